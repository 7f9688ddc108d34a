#include "setsolve/arith.hpp"
#include "setsolve/eval.hpp"
#include "solver_engine.hpp"

namespace setsolve {

namespace {

Formula A(CKind k, std::vector<Term> args) { return Formula::atom(k, std::move(args)); }
Term P(const Term& a, const Term& b) { return Term::pair(a, b); }
Formula And(std::initializer_list<Formula> fs) { return Formula::conj(std::vector<Formula>(fs)); }

bool non_numeric(const Term& t)
{
    switch (t.kind()) {
    case TermKind::Var:
    case TermKind::Int:
        return false;
    case TermKind::Arith:
        return non_numeric(t.lhs()) || non_numeric(t.rhs());
    default:
        return true;
    }
}

bool setlike(const Term& t) { return t.is_var() || t.is_set_term(); }

// Tail-free prefix of a set term: elements [from..] followed by tail.
Term rest_of(const FlatSet& f, std::size_t from)
{
    std::vector<Term> elems(f.elems.begin() + static_cast<std::ptrdiff_t>(from), f.elems.end());
    return Term::set_of(elems, f.tail);
}

}  // namespace

Formula SolverEngine::forall(const Term& ctrl, const Term& dom, const Formula& body, std::vector<std::string> locals)
{
    return Formula::atom(make_quant(CKind::Foreach, ctrl, dom, std::move(locals), body));
}

Formula SolverEngine::witness_neq(const Term& a, const Term& b)
{
    Term w = fresh_.var();
    return Formula::disj(And({A(CKind::In, {w, a}), A(CKind::Nin, {w, b})}),
                         And({A(CKind::In, {w, b}), A(CKind::Nin, {w, a})}));
}

bool SolverEngine::handle(State& s, Constraint c)
{
    if (opts_.ground_shortcut) {
        std::vector<std::string> fv;
        free_vars(c, fv);
        if (fv.empty()) {
            Truth t = evaluate(c, {}, opts_.program);
            if (t != Truth::Unknown)
                return t == Truth::True;
        }
    }
    const auto& a = c.args;
    switch (c.kind) {
    case CKind::Eq:
        return unify(s, a[0], a[1]);
    case CKind::Neq:
        return rule_neq(s, a[0], a[1], c);
    case CKind::In:
        return rule_in(s, a[0], a[1]);
    case CKind::Nin:
        return rule_nin(s, a[0], a[1], c);
    case CKind::Un:
        return rule_un(s, c);
    case CKind::Nun: {
        Term w = fresh_.var();
        branch(s, {And({A(CKind::In, {w, a[2]}), A(CKind::Nin, {w, a[0]}), A(CKind::Nin, {w, a[1]})}),
                   And({A(CKind::In, {w, a[0]}), A(CKind::Nin, {w, a[2]})}),
                   And({A(CKind::In, {w, a[1]}), A(CKind::Nin, {w, a[2]})})});
        return true;
    }
    case CKind::Disj: {
        if (!setlike(a[0]) || !setlike(a[1]))
            return false;
        if (a[0].is(TermKind::Empty) || a[1].is(TermKind::Empty))
            return true;
        if (a[0] == a[1])
            return unify(s, a[0], Term::empty());
        Term x = fresh_.var();
        if (a[0].is_var() && !a[1].is_var())
            push(s, forall(x, a[1], A(CKind::Nin, {x, a[0]})));
        else
            push(s, forall(x, a[0], A(CKind::Nin, {x, a[1]})));
        return true;
    }
    case CKind::Ndisj: {
        Term w = fresh_.var();
        push(s, And({A(CKind::In, {w, a[0]}), A(CKind::In, {w, a[1]})}));
        return true;
    }
    case CKind::Subset: {
        if (!setlike(a[0]) || !setlike(a[1]))
            return false;
        if (a[0].is(TermKind::Empty) || a[0] == a[1])
            return true;
        if (a[1].is(TermKind::Empty))
            return unify(s, a[0], Term::empty());
        Term x = fresh_.var();
        push(s, forall(x, a[0], A(CKind::In, {x, a[1]})));
        return true;
    }
    case CKind::Nsubset: {
        Term w = fresh_.var();
        push(s, And({A(CKind::In, {w, a[0]}), A(CKind::Nin, {w, a[1]})}));
        return true;
    }
    case CKind::Comp:
        return rule_comp(s, c);
    case CKind::Ncomp: {
        Term x = fresh_.var(), y = fresh_.var(), z = fresh_.var();
        Term p = fresh_.var(), q = fresh_.var(), r = fresh_.var(), t = fresh_.var();
        Formula none = forall(P(p, q), a[0],
                              Formula::atom(make_quant(CKind::Foreach, P(r, t), a[1], {},
                                                       Formula::disj({A(CKind::Neq, {p, x}), A(CKind::Neq, {q, r}),
                                                                      A(CKind::Neq, {t, z})}))));
        branch(s, {And({A(CKind::In, {P(x, z), a[2]}), none}),
                   And({A(CKind::In, {P(x, y), a[0]}), A(CKind::In, {P(y, z), a[1]}),
                        A(CKind::Nin, {P(x, z), a[2]})})});
        return true;
    }
    case CKind::Inv: {
        Term x = fresh_.var(), y = fresh_.var(), x2 = fresh_.var(), y2 = fresh_.var();
        push(s, And({forall(P(x, y), a[0], A(CKind::In, {P(y, x), a[1]})),
                     forall(P(x2, y2), a[1], A(CKind::In, {P(y2, x2), a[0]}))}));
        return true;
    }
    case CKind::Ninv: {
        Term x = fresh_.var(), y = fresh_.var();
        branch(s, {And({A(CKind::In, {P(x, y), a[0]}), A(CKind::Nin, {P(y, x), a[1]})}),
                   And({A(CKind::In, {P(x, y), a[1]}), A(CKind::Nin, {P(y, x), a[0]})})});
        return true;
    }
    case CKind::Id: {
        Term x = fresh_.var(), x2 = fresh_.var(), y2 = fresh_.var();
        push(s, And({forall(x, a[0], A(CKind::In, {P(x, x), a[1]})),
                     forall(P(x2, y2), a[1], And({A(CKind::Eq, {x2, y2}), A(CKind::In, {x2, a[0]})}))}));
        return true;
    }
    case CKind::Nid: {
        Term x = fresh_.var(), y = fresh_.var();
        branch(s, {And({A(CKind::In, {x, a[0]}), A(CKind::Nin, {P(x, x), a[1]})}),
                   And({A(CKind::In, {P(x, y), a[1]}),
                        Formula::disj(A(CKind::Neq, {x, y}), A(CKind::Nin, {x, a[0]}))})});
        return true;
    }
    case CKind::Dom:
    case CKind::Ran: {
        bool dom = c.kind == CKind::Dom;
        if (a[0].is(TermKind::Empty))
            return unify(s, a[1], Term::empty());
        if (a[1].is(TermKind::Empty))
            return unify(s, a[0], Term::empty());
        Term x = fresh_.var(), y = fresh_.var(), k = fresh_.var(), o = fresh_.var();
        push(s, And({forall(P(x, y), a[0], A(CKind::In, {dom ? x : y, a[1]})),
                     forall(k, a[1], A(CKind::In, {dom ? P(k, o) : P(o, k), a[0]}), {o.name()})}));
        return true;
    }
    case CKind::Ndom:
    case CKind::Nran: {
        bool dom = c.kind == CKind::Ndom;
        Term x = fresh_.var(), y = fresh_.var(), p = fresh_.var(), q = fresh_.var();
        Term key = dom ? x : y;
        branch(s, {And({A(CKind::In, {P(x, y), a[0]}), A(CKind::Nin, {key, a[1]})}),
                   And({A(CKind::In, {key, a[1]}), forall(P(p, q), a[0], A(CKind::Neq, {dom ? p : q, key}))})});
        return true;
    }
    case CKind::Pfun:
        return rule_pfun(s, c);
    case CKind::Npfun: {
        Term x = fresh_.var(), y = fresh_.var(), z = fresh_.var();
        push(s, And({A(CKind::In, {P(x, y), a[0]}), A(CKind::In, {P(x, z), a[0]}), A(CKind::Neq, {y, z})}));
        return true;
    }
    case CKind::ApplyTo: {
        Term p = fresh_.var(), q = fresh_.var();
        push(s, And({A(CKind::In, {P(a[1], a[2]), a[0]}),
                     forall(P(p, q), a[0], Formula::disj(A(CKind::Neq, {p, a[1]}), A(CKind::Eq, {q, a[2]})))}));
        return true;
    }
    case CKind::Foplus: {
        const Term &f = a[0], &x = a[1], &y = a[2], &g = a[3];
        Term z = fresh_.var(), h = fresh_.var();
        Term p1 = fresh_.var(), q1 = fresh_.var(), p2 = fresh_.var(), q2 = fresh_.var();
        branch(s, {And({A(CKind::Eq, {f, Term::ext(P(x, z), h)}), forall(P(p1, q1), h, A(CKind::Neq, {p1, x})),
                        A(CKind::Eq, {g, Term::ext(P(x, y), h)})}),
                   And({forall(P(p2, q2), f, A(CKind::Neq, {p2, x})), A(CKind::Eq, {g, Term::ext(P(x, y), f)})})});
        return true;
    }
    case CKind::Le:
    case CKind::Lt:
    case CKind::Is:
        return rule_arith(s, c);
    case CKind::Foreach:
        return rule_foreach(s, c);
    case CKind::Exists:
        return rule_exists(s, c);
    }
    return false;
}

bool SolverEngine::unify(State& s, const Term& a0, const Term& b0)
{
    Term a = s.subst.apply(a0);
    Term b = s.subst.apply(b0);
    if (a == b)
        return true;
    if (a.is_var())
        return bind_var(s, a, b);
    if (b.is_var())
        return bind_var(s, b, a);
    if (a.is_ground() && b.is_ground() && !a.is(TermKind::Interval) && !b.is(TermKind::Interval))
        return canonical(a) == canonical(b);
    if (a.is_set_term() || b.is_set_term()) {
        if (!a.is_set_term() || !b.is_set_term())
            return false;
        return set_unify(s, a, b);
    }
    if (a.kind() != b.kind())
        return false;
    switch (a.kind()) {
    case TermKind::Pair:
    case TermKind::Apply:
        push(s, CKind::Eq, {a.lhs(), b.lhs()});
        push(s, CKind::Eq, {a.rhs(), b.rhs()});
        return true;
    case TermKind::Arith:
        if (a.op() != b.op())
            return false;
        push(s, CKind::Eq, {a.lhs(), b.lhs()});
        push(s, CKind::Eq, {a.rhs(), b.rhs()});
        return true;
    default:
        return false;
    }
}

bool SolverEngine::bind_var(State& s, const Term& x, const Term& t)
{
    if (t.is_var() || !t.contains_var(x.name()))
        return bind(s, x.name(), t);
    if (t.is(TermKind::ExtSet)) {
        FlatSet f = flatten_set(t);
        if (f.tail == x) {
            for (const Term& e : f.elems)
                if (e.contains_var(x.name()))
                    return false;
            return bind(s, x.name(), Term::set_of(f.elems, fresh_.var()));
        }
    }
    return false;
}

bool SolverEngine::set_unify(State& s, const Term& a, const Term& b)
{
    if (a.is(TermKind::Interval) || b.is(TermKind::Interval)) {
        const Term& iv = a.is(TermKind::Interval) ? a : b;
        const Term& other = a.is(TermKind::Interval) ? b : a;
        if (other.is(TermKind::Empty)) {
            push(s, CKind::Lt, {iv.rhs(), iv.lhs()});
            return true;
        }
        store(s, Constraint{CKind::Eq, {a, b}, nullptr});
        return true;
    }
    if (a.is(TermKind::Empty) || b.is(TermKind::Empty)) {
        const Term& o = a.is(TermKind::Empty) ? b : a;
        if (o.is(TermKind::Empty))
            return true;
        if (o.is(TermKind::ExtSet))
            return false;
        branch(s, {A(CKind::Eq, {o.lhs(), Term::empty()}), A(CKind::Eq, {o.rhs(), Term::empty()})});
        return true;
    }
    if (a.is(TermKind::CP) && b.is(TermKind::CP)) {
        const Term e = Term::empty();
        branch(s, {And({A(CKind::Eq, {a.lhs(), b.lhs()}), A(CKind::Eq, {a.rhs(), b.rhs()})}),
                   And({A(CKind::Eq, {a.lhs(), e}), A(CKind::Eq, {b.lhs(), e})}),
                   And({A(CKind::Eq, {a.lhs(), e}), A(CKind::Eq, {b.rhs(), e})}),
                   And({A(CKind::Eq, {a.rhs(), e}), A(CKind::Eq, {b.lhs(), e})}),
                   And({A(CKind::Eq, {a.rhs(), e}), A(CKind::Eq, {b.rhs(), e})})});
        return true;
    }
    if (a.is(TermKind::CP) || b.is(TermKind::CP)) {
        const Term& cpt = a.is(TermKind::CP) ? a : b;
        const Term& ext = a.is(TermKind::CP) ? b : a;
        Term e = fresh_.var(), x = fresh_.var(), y = fresh_.var();
        push(s, And({forall(e, ext, A(CKind::In, {e, cpt})),
                     forall(x, cpt.lhs(),
                            Formula::atom(make_quant(CKind::Foreach, y, cpt.rhs(), {},
                                                     A(CKind::In, {P(x, y), ext}))))}));
        return true;
    }
    // Both extensional.
    FlatSet fa = flatten_set(a);
    FlatSet fb = flatten_set(b);
    if (fa.tail.is_var() && fa.tail == fb.tail) {
        for (const Term& t : fa.elems)
            push(s, CKind::In, {t, b});
        for (const Term& t : fb.elems)
            push(s, CKind::In, {t, a});
        return true;
    }
    const Term& t = fa.elems[0];
    const Term& u = fb.elems[0];
    Term ra = rest_of(fa, 1);
    Term rb = rest_of(fb, 1);
    Term n = fresh_.var();
    branch(s, {And({A(CKind::Eq, {t, u}), A(CKind::Eq, {ra, rb})}),
               And({A(CKind::Eq, {t, u}), A(CKind::Eq, {a, rb})}),
               And({A(CKind::Eq, {t, u}), A(CKind::Eq, {ra, b})}),
               And({A(CKind::Eq, {ra, Term::ext(u, n)}), A(CKind::Eq, {rb, Term::ext(t, n)})})});
    return true;
}

bool SolverEngine::rule_in(State& s, const Term& t, const Term& set)
{
    switch (set.kind()) {
    case TermKind::Empty:
        return false;
    case TermKind::ExtSet: {
        FlatSet f = flatten_set(set);
        std::vector<Formula> alts;
        for (const Term& e : f.elems) {
            if (e == t)
                return true;
            if (e.is_ground() && t.is_ground())
                continue;
            alts.push_back(A(CKind::Eq, {t, e}));
        }
        if (!f.tail.is(TermKind::Empty))
            alts.push_back(A(CKind::In, {t, f.tail}));
        if (alts.empty())
            return false;
        branch(s, alts);
        return true;
    }
    case TermKind::Var: {
        if (t.contains_var(set.name()))
            return false;
        Term n = fresh_.var();
        if (!bind(s, set.name(), Term::ext(t, n)))
            return false;
        push(s, CKind::Nin, {t, n});
        return true;
    }
    case TermKind::CP:
        if (t.is(TermKind::Pair)) {
            push(s, CKind::In, {t.lhs(), set.lhs()});
            push(s, CKind::In, {t.rhs(), set.rhs()});
            return true;
        }
        if (t.is_var()) {
            Term x = fresh_.var(), y = fresh_.var();
            push(s, And({A(CKind::Eq, {t, P(x, y)}), A(CKind::In, {x, set.lhs()}), A(CKind::In, {y, set.rhs()})}));
            return true;
        }
        return false;
    case TermKind::Interval:
        if (non_numeric(t))
            return false;
        push(s, CKind::Le, {set.lhs(), t});
        push(s, CKind::Le, {t, set.rhs()});
        return true;
    default:
        return false;
    }
}

bool SolverEngine::rule_nin(State& s, const Term& t, const Term& set, const Constraint& c)
{
    switch (set.kind()) {
    case TermKind::Empty:
        return true;
    case TermKind::ExtSet: {
        FlatSet f = flatten_set(set);
        for (const Term& e : f.elems)
            push(s, CKind::Neq, {t, e});
        if (!f.tail.is(TermKind::Empty))
            push(s, CKind::Nin, {t, f.tail});
        return true;
    }
    case TermKind::Var:
        if (!t.contains_var(set.name()))
            store(s, c);
        return true;
    case TermKind::CP:
        if (t.is(TermKind::Pair)) {
            branch(s, {A(CKind::Nin, {t.lhs(), set.lhs()}), A(CKind::Nin, {t.rhs(), set.rhs()})});
            return true;
        }
        if (t.is_var())
            store(s, c);
        return true;
    case TermKind::Interval:
        if (non_numeric(t))
            return true;
        branch(s, {A(CKind::Lt, {t, set.lhs()}), A(CKind::Lt, {set.rhs(), t})});
        return true;
    default:
        return true;
    }
}

bool SolverEngine::rule_neq(State& s, const Term& a, const Term& b, const Constraint& c)
{
    if (a == b)
        return false;
    if (a.is_ground() && b.is_ground())
        return !(canonical(a) == canonical(b));
    if (a.is_var() || b.is_var()) {
        const Term& x = a.is_var() ? a : b;
        const Term& t = a.is_var() ? b : a;
        if (!t.is_var() && !t.is_set_term() && t.contains_var(x.name()))
            return true;
        store(s, c);
        return true;
    }
    if (a.is_set_term() || b.is_set_term()) {
        if (!a.is_set_term() || !b.is_set_term())
            return true;
        push(s, witness_neq(a, b));
        return true;
    }
    if (a.kind() != b.kind())
        return true;
    switch (a.kind()) {
    case TermKind::Pair:
    case TermKind::Apply:
        branch(s, {A(CKind::Neq, {a.lhs(), b.lhs()}), A(CKind::Neq, {a.rhs(), b.rhs()})});
        return true;
    case TermKind::Arith:
        if (a.op() != b.op())
            return true;
        branch(s, {A(CKind::Neq, {a.lhs(), b.lhs()}), A(CKind::Neq, {a.rhs(), b.rhs()})});
        return true;
    default:
        return true;
    }
}

bool SolverEngine::rule_un(State& s, const Constraint& c)
{
    const Term &a = c.args[0], &b = c.args[1], &r = c.args[2];
    for (const Term* t : {&a, &b, &r})
        if (!setlike(*t))
            return false;
    if (a.is(TermKind::Empty))
        return unify(s, b, r);
    if (b.is(TermKind::Empty))
        return unify(s, a, r);
    if (r.is(TermKind::Empty)) {
        push(s, CKind::Eq, {a, Term::empty()});
        push(s, CKind::Eq, {b, Term::empty()});
        return true;
    }
    if (a == b)
        return unify(s, r, a);
    auto special = [](const Term& t) { return t.is(TermKind::CP) || t.is(TermKind::Interval); };
    if (special(a) || special(b) || special(r)) {
        Term x = fresh_.var(), y = fresh_.var(), z = fresh_.var();
        push(s, And({forall(x, a, A(CKind::In, {x, r})), forall(y, b, A(CKind::In, {y, r})),
                     forall(z, r, Formula::disj(A(CKind::In, {z, a}), A(CKind::In, {z, b})))}));
        return true;
    }
    if (r.is(TermKind::ExtSet)) {
        const Term& t = r.head();
        Term n = fresh_.var(), n1 = fresh_.var(), n2 = fresh_.var();
        push(s, And({A(CKind::Eq, {r, Term::ext(t, n)}), A(CKind::Nin, {t, n})}));
        Formula in_a = And({A(CKind::Eq, {a, Term::ext(t, n1)}), A(CKind::Nin, {t, n1})});
        Formula in_b = And({A(CKind::Eq, {b, Term::ext(t, n2)}), A(CKind::Nin, {t, n2})});
        branch(s, {And({in_a, A(CKind::Nin, {t, b}), A(CKind::Un, {n1, b, n})}),
                   And({in_b, A(CKind::Nin, {t, a}), A(CKind::Un, {a, n2, n})}),
                   And({in_a, in_b, A(CKind::Un, {n1, n2, n})})});
        return true;
    }
    if (a.is(TermKind::ExtSet) || b.is(TermKind::ExtSet)) {
        bool left = a.is(TermKind::ExtSet);
        const Term& x = left ? a : b;
        const Term& other = left ? b : a;
        const Term& t = x.head();
        Term n = fresh_.var(), n1 = fresh_.var(), n2 = fresh_.var();
        push(s, And({A(CKind::Eq, {x, Term::ext(t, n1)}), A(CKind::Nin, {t, n1}),
                     A(CKind::Eq, {r, Term::ext(t, n)}), A(CKind::Nin, {t, n})}));
        Formula un1 = left ? A(CKind::Un, {n1, other, n}) : A(CKind::Un, {other, n1, n});
        Formula un2 = left ? A(CKind::Un, {n1, n2, n}) : A(CKind::Un, {n2, n1, n});
        branch(s, {And({A(CKind::Nin, {t, other}), un1}),
                   And({A(CKind::Eq, {other, Term::ext(t, n2)}), A(CKind::Nin, {t, n2}), un2})});
        return true;
    }
    store(s, c);
    return true;
}

bool SolverEngine::rule_comp(State& s, const Constraint& c)
{
    const Term &r = c.args[0], &sr = c.args[1], &t = c.args[2];
    for (const Term* x : {&r, &sr, &t})
        if (!setlike(*x))
            return false;
    if (r.is(TermKind::Empty))
        return unify(s, t, Term::empty());
    if (r.is(TermKind::ExtSet) && r.tail().is(TermKind::Empty) && r.head().is(TermKind::Pair) &&
        r.head().lhs() == r.head().rhs() && t.is(TermKind::Empty)) {
        Term p = fresh_.var(), q = fresh_.var();
        push(s, forall(P(p, q), sr, A(CKind::Neq, {p, r.head().lhs()})));
        return true;
    }
    Term x = fresh_.var(), y = fresh_.var(), z = fresh_.var();
    Term x2 = fresh_.var(), y2 = fresh_.var(), y3 = fresh_.var(), z2 = fresh_.var();
    Formula inner = Formula::atom(make_quant(
        CKind::Foreach, P(y3, z2), sr, {},
        Formula::disj(A(CKind::Neq, {y2, y3}), A(CKind::In, {P(x2, z2), t}))));
    push(s, And({forall(P(x, z), t, And({A(CKind::In, {P(x, y), r}), A(CKind::In, {P(y, z), sr})}), {y.name()}),
                 forall(P(x2, y2), r, inner)}));
    return true;
}

bool SolverEngine::rule_pfun(State& s, const Constraint& c)
{
    const Term& f = c.args[0];
    switch (f.kind()) {
    case TermKind::Empty:
        return true;
    case TermKind::Var:
        store(s, c);
        return true;
    case TermKind::ExtSet: {
        Term x = fresh_.var(), y = fresh_.var(), p = fresh_.var(), q = fresh_.var();
        push(s, And({A(CKind::Eq, {f.head(), P(x, y)}),
                     forall(P(p, q), f.tail(), Formula::disj(A(CKind::Neq, {p, x}), A(CKind::Eq, {q, y}))),
                     A(CKind::Pfun, {f.tail()})}));
        return true;
    }
    case TermKind::CP: {
        Term y = fresh_.var();
        branch(s, {A(CKind::Eq, {f.lhs(), Term::empty()}), A(CKind::Eq, {f.rhs(), Term::empty()}),
                   A(CKind::Eq, {f.rhs(), Term::set_of({y})})});
        return true;
    }
    default:
        return false;
    }
}

bool SolverEngine::rule_arith(State& s, const Constraint& c)
{
    const Term& a = c.args[0];
    const Term& b = c.args[1];
    if (non_numeric(a) || non_numeric(b))
        return false;
    if (c.kind == CKind::Is) {
        if (b.is_ground()) {
            auto v = eval_int(b);
            return v && unify(s, a, Term::integer(*v));
        }
        auto lb = linearize(b);
        if (lb && lb->is_constant()) {
            const Rational& k = lb->constant;
            if (denominator(k) != 1 || !unify(s, a, Term::integer(static_cast<std::int64_t>(numerator(k)))))
                return false;
        }
        store(s, c);
        return true;
    }
    auto la = linearize(a);
    auto lb = linearize(b);
    if (la && lb) {
        LinExpr d = *la - *lb;
        if (d.is_constant())
            return c.kind == CKind::Le ? d.constant <= 0 : d.constant < 0;
    }
    store(s, c);
    return true;
}

Formula SolverEngine::instantiate(const Quant& q, const Term& elem)
{
    std::map<std::string, Term> m;
    std::vector<Formula> eqs;
    std::function<bool(const Term&, const Term&)> destructure = [&](const Term& pat, const Term& v) {
        if (pat.is_var()) {
            auto it = m.find(pat.name());
            if (it == m.end())
                m.emplace(pat.name(), v);
            else
                eqs.push_back(A(CKind::Eq, {it->second, v}));
            return true;
        }
        if (pat.is(TermKind::Pair) && v.is(TermKind::Pair))
            return destructure(pat.lhs(), v.lhs()) && destructure(pat.rhs(), v.rhs());
        return false;
    };
    if (!destructure(q.ctrl, elem)) {
        m.clear();
        eqs.clear();
        std::vector<std::string> cv;
        q.ctrl.collect_vars(cv);
        for (const auto& v : cv)
            m.emplace(v, fresh_.var());
        eqs.push_back(A(CKind::Eq, {replace_vars(q.ctrl, m), elem}));
    }
    for (const auto& l : q.locals)
        m[l] = fresh_.var();
    eqs.push_back(replace_vars(q.func, m));
    eqs.push_back(replace_vars(q.body, m));
    return Formula::conj(eqs);
}

Constraint SolverEngine::nest_cp(const Constraint& c, const Term& left, const Term& right)
{
    const Quant& q = *c.q;
    Term x = fresh_.var(), y = fresh_.var();
    std::vector<std::string> locals = q.locals;
    std::vector<std::string> cv;
    q.ctrl.collect_vars(cv);
    locals.insert(locals.end(), cv.begin(), cv.end());
    Constraint inner = make_quant(c.kind, y, right, std::move(locals), q.body,
                                  Formula::conj(A(CKind::Eq, {q.ctrl, P(x, y)}), q.func));
    return make_quant(c.kind, x, left, {}, Formula::atom(std::move(inner)));
}

bool SolverEngine::rule_foreach(State& s, const Constraint& c)
{
    const Quant& q = *c.q;
    const Term& d = q.domain;
    switch (d.kind()) {
    case TermKind::Empty:
        return true;
    case TermKind::ExtSet: {
        FlatSet f = flatten_set(d);
        for (const Term& e : f.elems)
            push(s, instantiate(q, e));
        if (!f.tail.is(TermKind::Empty))
            push(s, Formula::atom(make_quant(CKind::Foreach, q.ctrl, f.tail, q.locals, q.body, q.func)));
        return true;
    }
    case TermKind::Var:
    case TermKind::Interval:
        store(s, c);
        return true;
    case TermKind::CP:
        push(s, Formula::atom(nest_cp(c, d.lhs(), d.rhs())));
        return true;
    default:
        return false;
    }
}

bool SolverEngine::rule_exists(State& s, const Constraint& c)
{
    const Quant& q = *c.q;
    const Term& d = q.domain;
    switch (d.kind()) {
    case TermKind::Empty:
        return false;
    case TermKind::ExtSet: {
        FlatSet f = flatten_set(d);
        std::vector<Formula> alts;
        for (const Term& e : f.elems)
            alts.push_back(instantiate(q, e));
        if (!f.tail.is(TermKind::Empty))
            alts.push_back(Formula::atom(make_quant(CKind::Exists, q.ctrl, f.tail, q.locals, q.body, q.func)));
        branch(s, alts);
        return true;
    }
    case TermKind::Var: {
        std::map<std::string, Term> m;
        for (const auto& v : bound_vars(q))
            m.emplace(v, fresh_.var());
        Term ctrl = replace_vars(q.ctrl, m);
        if (!bind(s, d.name(), Term::ext(ctrl, fresh_.var())))
            return false;
        push(s, replace_vars(q.func, m));
        push(s, replace_vars(q.body, m));
        return true;
    }
    case TermKind::Interval:
        store(s, c);
        return true;
    case TermKind::CP:
        push(s, Formula::atom(nest_cp(c, d.lhs(), d.rhs())));
        return true;
    default:
        return false;
    }
}

bool SolverEngine::rule_call(State& s, const Formula& g)
{
    if (g.name() == kDecPredicate)
        return true;
    std::vector<const Clause*> clauses;
    if (opts_.program)
        clauses = opts_.program->clauses_of(g.name(), g.args().size());
    if (clauses.empty()) {
        inconclusive("unknown predicate " + g.name() + "/" + std::to_string(g.args().size()));
        return false;
    }
    std::vector<Formula> alts;
    for (const Clause* cl : clauses) {
        std::vector<std::string> vars;
        for (const Term& p : cl->params)
            p.collect_vars(vars);
        free_vars(cl->body, vars);
        std::map<std::string, Term> m;
        for (const auto& v : vars)
            m.emplace(v, fresh_.var());
        std::vector<Formula> parts;
        for (std::size_t i = 0; i < cl->params.size(); ++i)
            parts.push_back(A(CKind::Eq, {replace_vars(cl->params[i], m), s.subst.apply(g.args()[i])}));
        parts.push_back(rename_bound(replace_vars(cl->body, m), fresh_));
        alts.push_back(Formula::conj(parts));
    }
    branch(s, alts);
    return true;
}

}  // namespace setsolve
