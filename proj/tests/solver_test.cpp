#include <doctest.h>

#include <set>

#include "oracle.hpp"
#include "setsolve/eval.hpp"
#include "setsolve/parser.hpp"
#include "setsolve/solver.hpp"

using namespace setsolve;

namespace {

SolveStatus status_of(const std::string& src, std::size_t* count = nullptr, std::size_t max = 1)
{
    SolveResult r = solve(parse_formula(src), {}, max);
    if (count)
        *count = r.solutions.size();
    return r.status;
}

SolveOptions rewriting_only()
{
    SolveOptions o;
    o.ground_shortcut = false;
    return o;
}

oracle::Env env_of(const Substitution& s)
{
    oracle::Env env;
    for (const auto& [v, t] : s.bindings())
        env[v] = oracle::from_term(t);
    return env;
}

}  // namespace

TEST_CASE("set unification")
{
    std::size_t n = 0;
    CHECK(status_of("{X,Y} = {1,2}", &n, 10) == SolveStatus::Sat);
    CHECK(n == 2);
    CHECK(status_of("{X,Y} = {1}", &n, 10) == SolveStatus::Sat);
    CHECK(n == 1);
    CHECK(status_of("{a/R} = {b/S} & R = {} & S = {}") == SolveStatus::Unsat);
    CHECK(status_of("{X/R} = R") == SolveStatus::Sat);  // X in R absorbs
    CHECK(status_of("X = {X}") == SolveStatus::Unsat);
}

TEST_CASE("set operators")
{
    CHECK(status_of("un(A,B,{1,2}) & A = {1} & 2 nin B") == SolveStatus::Unsat);
    CHECK(status_of("un(A,B,C) & un(B,A,D) & C neq D") == SolveStatus::Unsat);
    CHECK(status_of("disj(A,B) & X in A & X in B") == SolveStatus::Unsat);
    CHECK(status_of("subset(A,B) & X in A & X nin B") == SolveStatus::Unsat);
    CHECK(status_of("subset({1,2},A) & disj(A,{2})") == SolveStatus::Unsat);
    CHECK(status_of("nsubset(A,{1}) & subset(A,{1})") == SolveStatus::Unsat);
    CHECK(status_of("ndisj(A,B) & A = {1}") == SolveStatus::Sat);
}

TEST_CASE("relational operators")
{
    CHECK(status_of("comp({[a,b]},{[b,c]},T) & T neq {[a,c]}") == SolveStatus::Unsat);
    CHECK(status_of("inv(R,{[1,2]}) & [1,2] in R") == SolveStatus::Unsat);
    CHECK(status_of("id({a,b},R) & [a,b] in R") == SolveStatus::Unsat);
    CHECK(status_of("dom(R,{a}) & ran(R,{1,2}) & pfun(R)") == SolveStatus::Unsat);
    CHECK(status_of("dom(R,{a}) & ran(R,{1,2})") == SolveStatus::Sat);
    CHECK(status_of("applyTo(F,a,1) & applyTo(F,a,2)") == SolveStatus::Unsat);
    CHECK(status_of("foplus({[a,1],[b,2]},a,3,G) & G neq {[a,3],[b,2]}") == SolveStatus::Unsat);
    CHECK(status_of("npfun(R) & pfun(R)") == SolveStatus::Unsat);
}

TEST_CASE("integers")
{
    CHECK(status_of("X in int(1,3) & X > 3") == SolveStatus::Unsat);
    CHECK(status_of("X is Y + 1 & Y is X + 1") == SolveStatus::Unsat);
    CHECK(status_of("X is Y - Y & Y in {1,2}") == SolveStatus::Sat);
    CHECK(status_of("X is Y - Y & X = 1") == SolveStatus::Unsat);
    CHECK(status_of("X is Y - Y & Y = a") == SolveStatus::Unsat);
    CHECK(status_of("X is Y - Y + Z & Z < 0") == SolveStatus::Sat);
    SolveResult r = solve(parse_formula("X is 2 * Y & 3 =< Y & Y < 5 & X neq 6"));
    REQUIRE(r.status == SolveStatus::Sat);
    CHECK(*r.solutions[0].bindings.find("X") == Term::integer(8));
}

TEST_CASE("quantifiers")
{
    CHECK(status_of("foreach(X in {1,2,3}, X in S) & 2 nin S") == SolveStatus::Unsat);
    CHECK(status_of("exists(X in S, X = a) & S = {b}") == SolveStatus::Unsat);
    CHECK(status_of("foreach([X,Y] in {[a,1],[b,2]}, [M], M = Y, M in T) & T = {1}") == SolveStatus::Unsat);
    CHECK(status_of("foreach(X in S, X neq a) & a in S") == SolveStatus::Unsat);
}

TEST_CASE("proving by refutation")
{
    Formula thm = parse_formula("un(A,B,C) & un(B,A,D) implies C = D");
    CHECK(prove(thm).status == ProofStatus::Proved);
    Formula broken = parse_formula("un(A,BBBB,C) & un(B,A,D) implies C = D");
    ProofResult r = prove(broken);
    REQUIRE(r.status == ProofStatus::Disproved);
    REQUIRE(r.counterexample);
    CHECK(evaluate(negate(broken), r.counterexample->bindings.bindings()) == Truth::True);
}

TEST_CASE("predicates from programs")
{
    Program p = parse_program("p(S) :- a in S & b nin S.\nq(X) :- X = 1.\nq(X) :- X = 2.\n");
    SolveOptions o;
    o.program = &p;
    CHECK(solve(parse_formula("p({a,b})"), o).status == SolveStatus::Unsat);
    CHECK(solve(parse_formula("p(S) & S = {a}"), o).status == SolveStatus::Sat);
    CHECK(solve(parse_formula("q(X)"), o, 5).solutions.size() == 2);
    CHECK(solve(parse_formula("neg(q(X)) & X in {1,2}"), o).status == SolveStatus::Unsat);
}

TEST_CASE("solutions satisfy their formula")
{
    for (const char* s : {"un(A,B,{1,2,3}) & disj(A,B) & 1 in A", "comp(R,R,T) & [a,b] in R & [b,c] in R",
                          "foplus(F,a,1,G) & F = {[a,0],[b,0]}", "X in {1,2} & Y in {X} & Y neq 1",
                          "dom(R,{a,b}) & pfun(R) & ran(R,{1})"}) {
        Formula f = parse_formula(s);
        SolveResult r = solve(f, {}, 3);
        REQUIRE(r.status == SolveStatus::Sat);
        for (const auto& sol : r.solutions)
            CHECK_MESSAGE(evaluate(f, sol.bindings.bindings()) == Truth::True, s);
    }
}

TEST_CASE("negation duality on ground instances")
{
    const CKind kinds[] = {CKind::In,   CKind::Un,      CKind::Disj, CKind::Subset, CKind::Comp,
                           CKind::Inv,  CKind::Id,      CKind::Dom,  CKind::Ran,    CKind::Pfun,
                           CKind::Eq,   CKind::Le,      CKind::Foreach, CKind::ApplyTo};
    oracle::Generator gen(11);
    for (CKind k : kinds) {
        for (int n = 0; n < 40; ++n) {
            Formula c = gen.ground(k);
            Formula nc = negate(c);
            SolveStatus pos = solve(c, rewriting_only()).status;
            SolveStatus neg = solve(nc, rewriting_only()).status;
            bool truth = oracle::holds(c, {});
            INFO(to_string(c));
            REQUIRE(pos != SolveStatus::Unknown);
            REQUIRE(neg != SolveStatus::Unknown);
            CHECK((pos == SolveStatus::Sat) == truth);
            CHECK((neg == SolveStatus::Sat) == !truth);
        }
    }
}

TEST_CASE("random formulas agree with brute force")
{
    oracle::Generator gen(2024);
    int unknown = 0, sat = 0;
    const int total = 250;
    for (int n = 0; n < total; ++n) {
        auto cs = n % 2 ? gen.conjunction(3) : gen.formula();
        bool expected = oracle::brute_force(cs.formula, cs.vars).has_value();
        SolveOptions o;
        o.max_steps = 200'000;
        SolveResult r = solve(cs.formula, o);
        INFO(to_string(cs.formula));
        if (r.status == SolveStatus::Unknown) {
            ++unknown;
            continue;
        }
        CHECK((r.status == SolveStatus::Sat) == expected);
        if (r.status == SolveStatus::Sat) {
            ++sat;
            CHECK(oracle::holds(cs.formula, env_of(r.solutions[0].bindings)));
        }
    }
    MESSAGE("sat " << sat << ", unknown " << unknown << " of " << total);
    CHECK(unknown * 20 < total);
    // Both outcomes must be well represented for the comparison to mean anything.
    CHECK(sat * 10 > total);
    CHECK((total - sat - unknown) * 10 > total);
}
