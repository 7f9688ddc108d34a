#include <doctest.h>

#include "setsolve/parser.hpp"
#include "setsolve/substitution.hpp"
#include "setsolve/term.hpp"

using namespace setsolve;

TEST_CASE("ground sets are canonical")
{
    Term a = parse_term("{c,a,b,a}");
    Term b = parse_term("{b,c,a}");
    CHECK(a == b);
    CHECK(to_string(a) == "{a,b,c}");
    CHECK(parse_term("{a/{b}}") == parse_term("{a,b}"));
    CHECK(canonical(parse_term("cp({a},{1,2})")) == parse_term("{[a,1],[a,2]}"));
    CHECK(canonical(parse_term("int(1,3)")) == parse_term("{1,2,3}"));
    CHECK(canonical(parse_term("int(3,1)")) == Term::empty());
}

TEST_CASE("nested sets compare by value")
{
    CHECK(parse_term("{{b,a},{}}") == parse_term("{{},{a,b}}"));
    CHECK(parse_term("{[a,{2,1}]}") == parse_term("{[a,{1,2}]}"));
    CHECK_FALSE(parse_term("{a}") == parse_term("{a,b}"));
}

TEST_CASE("non-ground sets keep their tail")
{
    Term t = parse_term("{a,X/R}");
    CHECK_FALSE(t.is_ground());
    FlatSet fs = flatten_set(t);
    CHECK(fs.elems.size() == 2);
    CHECK(fs.tail == Term::var("R"));
    CHECK(t.contains_var("X"));
    CHECK_FALSE(t.contains_var("Y"));
    CHECK((t.var_mask() & var_bit("R")) != 0);
}

TEST_CASE("term printing round-trips")
{
    for (const char* s : {"{a,b,c}", "[X,{1,2}]", "cp(A,{true})", "{X/R}", "int(1,N)", "[a,[b,c]]", "{}"}) {
        Term t = parse_term(s);
        CHECK(parse_term(to_string(t)) == t);
    }
}

TEST_CASE("substitution resolves and refuses cycles")
{
    Substitution s;
    CHECK(s.bind("X", parse_term("{Y}")));
    CHECK(s.bind("Y", parse_term("a")));
    CHECK(s.apply(Term::var("X")) == parse_term("{a}"));
    CHECK_FALSE(s.bind("Z", parse_term("{Z}")));
    Substitution t;
    CHECK(t.bind("A", parse_term("{B}")));
    CHECK_FALSE(t.bind("B", parse_term("[A,1]")));
    CHECK(t.size() == 1);
    CHECK(s.restrict({"X"}).size() == 1);
}

TEST_CASE("parse errors carry positions")
{
    try {
        parse_formula("X in {a,b");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.span.line == 1);
        CHECK(e.span.col > 1);
    }
    CHECK_THROWS_AS(parse_formula("un(A,B)"), ParseError);
    CHECK_THROWS_AS(parse_formula("X in"), ParseError);
}

TEST_CASE("formula syntax")
{
    Formula f = parse_formula("un(A,B,C) & nun(B,A,C)");
    REQUIRE(f.is(FKind::And));
    CHECK(f.left().constraint().kind == CKind::Un);
    CHECK(f.right().constraint().kind == CKind::Nun);

    Formula q = parse_formula("foreach([X,Y] in R, [Z], Z = Y, Z neq X)");
    REQUIRE(q.is(FKind::Atom));
    const Quant& qu = *q.constraint().q;
    CHECK(qu.locals.size() == 1);
    CHECK(qu.ctrl.is(TermKind::Pair));

    CHECK(parse_formula("A = B implies B = C").is(FKind::Implies));
    CHECK(parse_formula("neg(X = a)").is(FKind::Neg));
    CHECK(parse_formula("X = a or X = b").is(FKind::Or));
    CHECK(parse_formula("X is Y + 2 * Z").constraint().kind == CKind::Is);

    for (const char* s : {"un(A,B,C) & X nin A", "foreach(X in S, X in T)", "X =< 3 & Y < X",
                          "exists(P in D, applyTo(F,P,true))", "neg(X = a or Y = b)"}) {
        Formula g = parse_formula(s);
        CHECK(to_string(parse_formula(to_string(g))) == to_string(g));
    }
}

TEST_CASE("programs collect clauses, queries and types")
{
    Program p = parse_program(R"(
:- def_type(col, etype([red,green])).
:- dec_p_type(p(stype(col))).
p(S) :- red in S.
?- p(X).
)");
    CHECK(p.clauses.size() == 1);
    CHECK(p.queries.size() == 1);
    CHECK(p.type_defs.count("col") == 1);
    CHECK(p.clauses_of("p", 1).size() == 1);
    CHECK(p.clauses_of("p", 2).empty());
}
