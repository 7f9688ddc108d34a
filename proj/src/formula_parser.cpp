#include "formula_parser.hpp"

#include <map>

namespace setsolve::detail {

namespace {

const std::map<std::string, CKind>& builtins()
{
    static const std::map<std::string, CKind> m = {
        {"un", CKind::Un},         {"nun", CKind::Nun},       {"disj", CKind::Disj},
        {"ndisj", CKind::Ndisj},   {"subset", CKind::Subset}, {"nsubset", CKind::Nsubset},
        {"comp", CKind::Comp},     {"ncomp", CKind::Ncomp},   {"inv", CKind::Inv},
        {"ninv", CKind::Ninv},     {"id", CKind::Id},         {"nid", CKind::Nid},
        {"pfun", CKind::Pfun},     {"npfun", CKind::Npfun},   {"dom", CKind::Dom},
        {"ndom", CKind::Ndom},     {"ran", CKind::Ran},       {"nran", CKind::Nran},
        {"applyTo", CKind::ApplyTo}, {"foplus", CKind::Foplus},
    };
    return m;
}

const char* const kRelops[] = {"=", "neq", "!=", "=/=", "\\=", "in", "nin", "=<", "<", ">=", ">", "is"};

}  // namespace

bool is_builtin_constraint(const std::string& name) { return builtins().count(name) != 0; }

const Token& FormulaParser::peek(std::size_t k) const
{
    std::size_t i = pos + k;
    return i < toks_.size() ? toks_[i] : toks_.back();
}

Token FormulaParser::next()
{
    Token t = peek();
    if (pos < toks_.size() - 1)
        ++pos;
    return t;
}

bool FormulaParser::is_punct(const char* p, std::size_t k) const
{
    const Token& t = peek(k);
    return t.kind == Tok::Punct && t.text == p;
}

bool FormulaParser::is_ident(const char* name, std::size_t k) const
{
    const Token& t = peek(k);
    return t.kind == Tok::Ident && !t.quoted && t.text == name;
}

bool FormulaParser::accept(const char* p)
{
    if (!is_punct(p))
        return false;
    next();
    return true;
}

void FormulaParser::expect(const char* p)
{
    if (!accept(p))
        fail(std::string("expected '") + p + "'");
}

std::string FormulaParser::expect_ident()
{
    if (peek().kind != Tok::Ident)
        fail("expected identifier");
    return next().text;
}

void FormulaParser::fail(const std::string& msg) const
{
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(msg + ", found " + found, t.span);
}

bool FormulaParser::relop_at(std::size_t k) const
{
    const Token& t = peek(k);
    if (t.quoted)
        return false;
    if (t.kind != Tok::Punct && t.kind != Tok::Ident)
        return false;
    for (const char* op : kRelops)
        if (t.text == op)
            return true;
    return false;
}

Formula FormulaParser::formula() { return implication(); }

Formula FormulaParser::implication()
{
    Formula lhs = disjunction();
    if (is_ident("implies")) {
        Span s = next().span;
        Formula rhs = implication();
        return Formula::implies(lhs, rhs, s);
    }
    return lhs;
}

Formula FormulaParser::disjunction()
{
    Formula lhs = conjunction();
    while (is_ident("or")) {
        next();
        Formula rhs = conjunction();
        lhs = Formula::disj(lhs, rhs);
    }
    return lhs;
}

Formula FormulaParser::conjunction()
{
    Formula lhs = unary();
    while (is_punct("&")) {
        next();
        Formula rhs = unary();
        lhs = Formula::conj(lhs, rhs);
    }
    return lhs;
}

Formula FormulaParser::unary()
{
    const Token& t = peek();
    Span s = t.span;
    if (is_punct("(")) {
        std::size_t save = pos;
        try {
            next();
            Formula f = formula();
            expect(")");
            if (!relop_at(0) && !is_punct("+") && !is_punct("-") && !is_punct("*"))
                return f;
        } catch (const ParseError&) {
        }
        pos = save;
        return relation();
    }
    if (t.kind == Tok::Ident && !t.quoted && !relop_at(1)) {
        bool call = is_punct("(", 1);
        if (t.text == "neg" && call) {
            next();
            next();
            Formula f = formula();
            expect(")");
            return Formula::neg(f, s);
        }
        if ((t.text == "foreach" || t.text == "exists") && call) {
            next();
            next();
            return quantifier(t.text == "foreach" ? CKind::Foreach : CKind::Exists, s);
        }
        if (call && is_builtin_constraint(t.text)) {
            std::string name = next().text;
            next();
            return builtin(name, s);
        }
        if (t.text == "true" && !call) {
            next();
            return Formula::truth();
        }
        if (t.text == "false" && !call) {
            next();
            return Formula::falsity();
        }
        if (!machine_mode) {
            if (call && t.text == "dec") {
                next();
                next();
                Term v = term();
                expect(",");
                TypeExpr ty = type();
                expect(")");
                return Formula::call(kDecPredicate, {v, Term::str(to_string(ty))}, s);
            }
            if (call && t.text != "cp" && t.text != "int") {
                std::string name = next().text;
                next();
                std::vector<Term> args = term_list(")");
                return Formula::call(name, std::move(args), s);
            }
            if (!call) {
                std::string name = next().text;
                return Formula::call(name, {}, s);
            }
        }
    }
    return relation();
}

Formula FormulaParser::builtin(const std::string& name, Span s)
{
    CKind k = builtins().at(name);
    std::vector<Term> args = term_list(")");
    if (args.size() != ckind_arity(k))
        throw ParseError(name + " expects " + std::to_string(ckind_arity(k)) + " arguments", s);
    return Formula::atom(k, std::move(args), s);
}

Formula FormulaParser::quantifier(CKind kind, Span s)
{
    // Binder list: [X in A, Y in B] nests quantifiers left to right.
    std::vector<std::pair<Term, Term>> binders;
    if (is_punct("[")) {
        std::size_t save = pos;
        next();
        Term first = term();
        if (is_ident("in")) {
            next();
            binders.emplace_back(first, term());
            while (accept(",")) {
                Term c = term();
                if (!is_ident("in"))
                    fail("expected 'in'");
                next();
                binders.emplace_back(c, term());
            }
            expect("]");
        } else {
            pos = save;
        }
    }
    if (binders.empty()) {
        Term ctrl = term();
        if (!is_ident("in"))
            fail("expected 'in'");
        next();
        binders.emplace_back(ctrl, term());
    }
    expect(",");
    std::vector<std::string> locals;
    bool has_locals = false;
    if (is_punct("[")) {
        std::size_t k = 1;
        bool all_vars = true;
        while (!is_punct("]", k)) {
            if (peek(k).kind != Tok::Var || !(is_punct(",", k + 1) || is_punct("]", k + 1))) {
                all_vars = false;
                break;
            }
            k += is_punct(",", k + 1) ? 2 : 1;
        }
        if (all_vars && is_punct(",", k + 1)) {
            has_locals = true;
            next();
            while (!is_punct("]")) {
                locals.push_back(next().text);
                accept(",");
            }
            expect("]");
            expect(",");
        }
    }
    Formula body = formula();
    Formula func = Formula::truth();
    if (has_locals && accept(","))
        func = formula();
    expect(")");
    Formula out;
    for (std::size_t i = binders.size(); i-- > 0;) {
        bool innermost = i + 1 == binders.size();
        Constraint c = make_quant(kind, binders[i].first, binders[i].second,
                                  innermost ? locals : std::vector<std::string>{},
                                  innermost ? body : out, innermost ? func : Formula::truth());
        out = Formula::atom(std::move(c), s);
    }
    return out;
}

Formula FormulaParser::relation()
{
    Span s = peek().span;
    Term lhs = term();
    if (!relop_at(0))
        fail("expected a relation");
    std::string op = next().text;
    Term rhs = term();
    if (op == "=")
        return Formula::atom(CKind::Eq, {lhs, rhs}, s);
    if (op == "neq" || op == "!=" || op == "=/=" || op == "\\=")
        return Formula::atom(CKind::Neq, {lhs, rhs}, s);
    if (op == "in")
        return Formula::atom(CKind::In, {lhs, rhs}, s);
    if (op == "nin")
        return Formula::atom(CKind::Nin, {lhs, rhs}, s);
    if (op == "=<")
        return Formula::atom(CKind::Le, {lhs, rhs}, s);
    if (op == "<")
        return Formula::atom(CKind::Lt, {lhs, rhs}, s);
    if (op == ">=")
        return Formula::atom(CKind::Le, {rhs, lhs}, s);
    if (op == ">")
        return Formula::atom(CKind::Lt, {rhs, lhs}, s);
    return Formula::atom(CKind::Is, {lhs, rhs}, s);
}

Term FormulaParser::term() { return additive(); }

Term FormulaParser::additive()
{
    Term lhs = multiplicative();
    while (is_punct("+") || is_punct("-")) {
        char op = next().text[0];
        lhs = Term::arith(op, lhs, multiplicative());
    }
    return lhs;
}

Term FormulaParser::multiplicative()
{
    Term lhs = primary();
    while (is_punct("*")) {
        next();
        lhs = Term::arith('*', lhs, primary());
    }
    return lhs;
}

std::vector<Term> FormulaParser::term_list(const char* close)
{
    std::vector<Term> out;
    if (accept(close))
        return out;
    out.push_back(term());
    while (accept(","))
        out.push_back(term());
    expect(close);
    return out;
}

Term FormulaParser::primary()
{
    const Token& t = peek();
    switch (t.kind) {
    case Tok::Var: {
        Term v = Term::var(next().text);
        if (machine_mode && is_punct("(")) {
            next();
            Term arg = term();
            expect(")");
            return Term::apply(v, arg);
        }
        return v;
    }
    case Tok::Int:
        return Term::integer(next().value);
    case Tok::Str:
        return Term::str(next().text);
    case Tok::Ident: {
        Token id = next();
        if (!id.quoted && is_punct("(")) {
            if (id.text == "cp" || id.text == "int") {
                next();
                Term a = term();
                expect(",");
                Term b = term();
                expect(")");
                return id.text == "cp" ? Term::cp(a, b) : Term::interval(a, b);
            }
            if (machine_mode) {
                Term fn = Term::atom(id.text);
                if (ident_hook)
                    if (auto m = ident_hook(id.text))
                        fn = *m;
                next();
                Term arg = term();
                expect(")");
                return Term::apply(fn, arg);
            }
            --pos;
            fail("compound terms are not supported");
        }
        if (!id.quoted && ident_hook)
            if (auto m = ident_hook(id.text))
                return *m;
        return Term::atom(id.text);
    }
    case Tok::Punct:
        break;
    case Tok::End:
        fail("expected a term");
    }
    if (is_punct("-") && peek(1).kind == Tok::Int) {
        next();
        return Term::integer(-next().value);
    }
    if (is_punct("-")) {
        next();
        return Term::arith('-', Term::integer(0), primary());
    }
    if (accept("(")) {
        Term inner = term();
        expect(")");
        return inner;
    }
    if (accept("{")) {
        std::vector<Term> elems;
        Term tail = Term::empty();
        if (accept("}"))
            return Term::empty();
        elems.push_back(term());
        while (accept(","))
            elems.push_back(term());
        if (accept("/") || accept("|"))
            tail = term();
        expect("}");
        if (!(tail.is(TermKind::Empty) || tail.is(TermKind::ExtSet) || tail.is_var() || tail.is(TermKind::CP) ||
              tail.is(TermKind::Interval)))
            fail("set tail must be a set or a variable");
        return Term::set_of(elems, tail);
    }
    if (accept("[")) {
        std::vector<Term> elems = term_list("]");
        if (elems.size() < 2)
            fail("tuples need at least two components");
        Term out = elems.back();
        for (std::size_t i = elems.size() - 1; i-- > 0;)
            out = Term::pair(elems[i], out);
        return out;
    }
    fail("expected a term");
}

TypeExpr FormulaParser::type()
{
    if (accept("[")) {
        std::vector<TypeExpr> comps;
        comps.push_back(type());
        while (accept(","))
            comps.push_back(type());
        expect("]");
        if (comps.size() < 2)
            fail("product types need at least two components");
        return TypeExpr::product(std::move(comps));
    }
    Span at = peek().span;
    std::string name = expect_ident();
    if (name == "atom" && is_punct("?")) {
        pos = pos - 1;
        (void)at;
        fail("ur-element types (atom?T) are not supported");
    }
    if (name == "int")
        return TypeExpr::integer();
    if (name == "str")
        return TypeExpr::string();
    if (name == "etype") {
        expect("(");
        expect("[");
        std::vector<std::string> members;
        if (!is_punct("]")) {
            members.push_back(expect_ident());
            while (accept(","))
                members.push_back(expect_ident());
        }
        expect("]");
        expect(")");
        return TypeExpr::enumeration(std::move(members));
    }
    if ((name == "stype" || name == "set") && is_punct("(")) {
        next();
        TypeExpr e = type();
        expect(")");
        return TypeExpr::set_of(std::move(e));
    }
    if ((name == "rel" || name == "pfun") && is_punct("(")) {
        next();
        TypeExpr a = type();
        expect(",");
        TypeExpr b = type();
        expect(")");
        return TypeExpr::set_of(TypeExpr::product({std::move(a), std::move(b)}));
    }
    return TypeExpr::named(std::move(name));
}

}  // namespace setsolve::detail
