#include "setsolve/machine.hpp"

namespace setsolve {

namespace {

struct Lifter {
    FreshGen& fresh;
    std::vector<std::string> vars;
    std::vector<Formula> defs;

    Term define(CKind k, std::vector<Term> args)
    {
        Term m = fresh.var();
        vars.push_back(m.name());
        args.push_back(m);
        if (k == CKind::Is)
            std::swap(args[0], args[1]);
        defs.push_back(Formula::atom(k, std::move(args)));
        return m;
    }

    Term numeric(const Term& t)
    {
        if (t.is(TermKind::Arith))
            return Term::arith(t.op(), numeric(t.lhs()), numeric(t.rhs()));
        return plain(t);
    }

    Term plain(const Term& t)
    {
        switch (t.kind()) {
        case TermKind::Apply:
            return define(CKind::ApplyTo, {plain(t.lhs()), plain(t.rhs())});
        case TermKind::Arith:
            return define(CKind::Is, {numeric(t)});
        case TermKind::Pair:
            return Term::pair(plain(t.lhs()), plain(t.rhs()));
        case TermKind::ExtSet:
            return Term::ext(plain(t.head()), plain(t.tail()));
        case TermKind::CP:
            return Term::cp(plain(t.lhs()), plain(t.rhs()));
        case TermKind::Interval:
            return Term::interval(numeric(t.lhs()), numeric(t.rhs()));
        default:
            return t;
        }
    }

    Formula wrap(Formula body)
    {
        if (vars.empty())
            return body;
        return Formula::let(vars, Formula::conj(defs), std::move(body));
    }
};

bool sugar_free(const Term& t)
{
    switch (t.kind()) {
    case TermKind::Apply:
    case TermKind::Arith:
        return false;
    case TermKind::Pair:
    case TermKind::ExtSet:
    case TermKind::CP:
    case TermKind::Interval:
        return sugar_free(t.lhs()) && sugar_free(t.rhs());
    default:
        return true;
    }
}

Formula desugar_atom(const Formula& f, FreshGen& fresh)
{
    const Constraint& c = f.constraint();
    if (c.kind == CKind::Foreach || c.kind == CKind::Exists) {
        const Quant& q = *c.q;
        Lifter l{fresh, {}, {}};
        Term dom = l.plain(q.domain);
        Constraint nc = make_quant(c.kind, q.ctrl, dom, q.locals, desugar_formula(q.body, fresh),
                                   desugar_formula(q.func, fresh));
        return l.wrap(Formula::atom(std::move(nc), f.span()));
    }
    if (c.kind == CKind::Eq) {
        for (int side = 0; side < 2; ++side) {
            const Term& app = c.args[side];
            const Term& other = c.args[1 - side];
            if (app.is(TermKind::Apply) && sugar_free(app.lhs()) && sugar_free(app.rhs()) && sugar_free(other))
                return Formula::atom(CKind::ApplyTo, {app.lhs(), app.rhs(), other}, f.span());
        }
        for (int side = 0; side < 2; ++side) {
            const Term& ex = c.args[side];
            const Term& other = c.args[1 - side];
            if (ex.is(TermKind::Arith) && other.is_var()) {
                Lifter l{fresh, {}, {}};
                Term e = l.numeric(ex);
                return l.wrap(Formula::atom(CKind::Is, {other, e}, f.span()));
            }
        }
    }
    bool arithmetic = c.kind == CKind::Le || c.kind == CKind::Lt || c.kind == CKind::Is;
    bool clean = true;
    for (const auto& a : c.args)
        if (!sugar_free(a))
            clean = false;
    if (clean)
        return f;
    Lifter l{fresh, {}, {}};
    std::vector<Term> args;
    for (const auto& a : c.args)
        args.push_back(arithmetic ? l.numeric(a) : l.plain(a));
    return l.wrap(Formula::atom(c.kind, std::move(args), f.span()));
}

}  // namespace

Formula desugar_formula(const Formula& f, FreshGen& fresh)
{
    switch (f.kind()) {
    case FKind::True:
    case FKind::False:
    case FKind::Call:
        return f;
    case FKind::Atom:
        return desugar_atom(f, fresh);
    case FKind::And:
        return Formula::conj(desugar_formula(f.left(), fresh), desugar_formula(f.right(), fresh));
    case FKind::Or:
        return Formula::disj(desugar_formula(f.left(), fresh), desugar_formula(f.right(), fresh));
    case FKind::Implies:
        return Formula::implies(desugar_formula(f.left(), fresh), desugar_formula(f.right(), fresh), f.span());
    case FKind::Neg:
        return Formula::neg(desugar_formula(f.left(), fresh), f.span());
    case FKind::Let:
        return Formula::let(f.vars(), desugar_formula(f.left(), fresh), desugar_formula(f.right(), fresh));
    }
    return f;
}

Formula desugar_action(const Action& a, bool initial, FreshGen& fresh)
{
    Term cur = Term::var(a.target);
    Term next = initial ? cur : Term::var(primed(a.target));
    Lifter l{fresh, {}, {}};
    Formula body;
    if (a.index) {
        if (initial)
            throw std::runtime_error("functional override '" + a.label + "' is not allowed in init");
        body = Formula::atom(CKind::Foplus, {cur, l.plain(*a.index), l.plain(a.value), next}, a.span);
    } else if (a.value.is(TermKind::Arith)) {
        body = Formula::atom(CKind::Is, {next, l.numeric(a.value)}, a.span);
    } else {
        body = Formula::atom(CKind::Eq, {next, l.plain(a.value)}, a.span);
    }
    return l.wrap(std::move(body));
}

std::vector<TypeError> typecheck_machine(const Machine& m)
{
    Program defs;
    for (const auto& [n, t] : m.type_defs)
        defs.type_defs[n] = t;
    std::map<std::string, TypeExpr> declared = m.declared_types();
    std::vector<TypeError> errors;
    auto add = [&](const TypeCheckResult& r, const std::string& where) {
        for (auto e : r.errors) {
            e.message = where + ": " + e.message;
            errors.push_back(std::move(e));
        }
    };
    auto check = [&](const std::vector<Formula>& fs, const std::map<std::string, TypeExpr>& decl,
                     const std::string& where) { add(typecheck_formula(Formula::conj(fs), &defs, decl), where); };
    for (const auto& i : m.invariants)
        check({i.formula}, declared, "invariant " + i.label);
    FreshGen fresh("M");
    std::vector<Formula> init;
    for (const auto& a : m.init)
        init.push_back(desugar_action(a, true, fresh));
    check(init, declared, "init");
    for (const auto& e : m.events) {
        auto decl = declared;
        for (const auto& p : e.params)
            if (p.type)
                decl[p.var] = resolve_type(*p.type, m.type_map());
        std::vector<Formula> fs;
        for (const auto& g : e.guards)
            fs.push_back(g.formula);
        for (const auto& a : e.actions)
            fs.push_back(desugar_action(a, false, fresh));
        check(fs, decl, "event " + e.name);
    }
    return errors;
}

}  // namespace setsolve
