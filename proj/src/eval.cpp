#include "setsolve/eval.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "setsolve/arith.hpp"

namespace setsolve {

namespace {

constexpr int kMaxCallDepth = 200;

enum class Match { Yes, No, Unknown };

Truth not_truth(Truth t)
{
    switch (t) {
    case Truth::True: return Truth::False;
    case Truth::False: return Truth::True;
    default: return Truth::Unknown;
    }
}

Truth from_bool(bool b) { return b ? Truth::True : Truth::False; }

std::optional<std::vector<Term>> members(const Term& s)
{
    std::vector<Term> out;
    if (!ground_members(s, out))
        return std::nullopt;
    return out;
}

bool contains(const std::vector<Term>& sorted, const Term& x)
{
    return std::binary_search(sorted.begin(), sorted.end(), x);
}

class Evaluator {
public:
    explicit Evaluator(const Program* prog) : prog_(prog) {}

    Truth formula(const Formula& f, const Env& env)
    {
        switch (f.kind()) {
        case FKind::True:
            return Truth::True;
        case FKind::False:
            return Truth::False;
        case FKind::Atom:
            return constraint(f.constraint(), env);
        case FKind::And: {
            Truth a = formula(f.left(), env);
            if (a == Truth::False)
                return a;
            Truth b = formula(f.right(), env);
            if (b == Truth::False)
                return b;
            return (a == Truth::True && b == Truth::True) ? Truth::True : Truth::Unknown;
        }
        case FKind::Or: {
            Truth a = formula(f.left(), env);
            if (a == Truth::True)
                return a;
            Truth b = formula(f.right(), env);
            if (b == Truth::True)
                return b;
            return (a == Truth::False && b == Truth::False) ? Truth::False : Truth::Unknown;
        }
        case FKind::Neg:
            return not_truth(formula(f.left(), env));
        case FKind::Implies: {
            Truth a = formula(f.left(), env);
            if (a == Truth::False)
                return Truth::True;
            Truth b = formula(f.right(), env);
            if (b == Truth::True)
                return b;
            return (a == Truth::True && b == Truth::False) ? Truth::False : Truth::Unknown;
        }
        case FKind::Call:
            return call(f, env);
        case FKind::Let: {
            Env inner = env;
            for (const auto& v : f.vars())
                inner.erase(v);
            std::vector<Formula> parts;
            flatten(f.left(), parts);
            flatten(f.right(), parts);
            std::set<std::string> unbound(f.vars().begin(), f.vars().end());
            return search(parts, inner, unbound);
        }
        }
        return Truth::Unknown;
    }

    Truth constraint(const Constraint& c, const Env& env)
    {
        if (c.kind == CKind::Foreach || c.kind == CKind::Exists)
            return quant(c, env);
        std::vector<Term> a;
        a.reserve(c.args.size());
        for (const Term& t : c.args) {
            auto v = value(t, env);
            if (!v)
                return Truth::Unknown;
            a.push_back(*v);
        }
        switch (c.kind) {
        case CKind::Eq: return from_bool(a[0] == a[1]);
        case CKind::Neq: return from_bool(!(a[0] == a[1]));
        case CKind::In: return set_pred(a[1], [&] { return ground_member(a[0], a[1]); });
        case CKind::Nin: return not_truth(set_pred(a[1], [&] { return ground_member(a[0], a[1]); }));
        case CKind::Un: return un(a);
        case CKind::Nun: return not_truth(un(a));
        case CKind::Disj: return disj(a);
        case CKind::Ndisj: return not_truth(disj(a));
        case CKind::Subset: return subset(a);
        case CKind::Nsubset: return not_truth(subset(a));
        case CKind::Comp: return comp(a);
        case CKind::Ncomp: return not_truth(comp(a));
        case CKind::Inv: return inv(a);
        case CKind::Ninv: return not_truth(inv(a));
        case CKind::Id: return id(a);
        case CKind::Nid: return not_truth(id(a));
        case CKind::Pfun: return pfun(a[0]);
        case CKind::Npfun: return not_truth(pfun(a[0]));
        case CKind::Dom: return dom_ran(a, true);
        case CKind::Ndom: return not_truth(dom_ran(a, true));
        case CKind::Ran: return dom_ran(a, false);
        case CKind::Nran: return not_truth(dom_ran(a, false));
        case CKind::ApplyTo: return apply_to(a);
        case CKind::Foplus: return foplus(a);
        case CKind::Le:
        case CKind::Lt: {
            if (!a[0].is(TermKind::Int) || !a[1].is(TermKind::Int))
                return Truth::False;
            return from_bool(c.kind == CKind::Le ? a[0].value() <= a[1].value() : a[0].value() < a[1].value());
        }
        case CKind::Is: {
            auto v = eval_int(a[1]);
            if (!v)
                return Truth::False;
            return from_bool(a[0].is(TermKind::Int) && a[0].value() == *v);
        }
        default:
            return Truth::Unknown;
        }
    }

private:
    const Program* prog_;
    int depth_ = 0;

    static std::optional<Term> value(const Term& t, const Env& env)
    {
        Term r = t;
        if (!t.is_ground()) {
            std::map<std::string, Term> m;
            std::vector<std::string> vs;
            t.collect_vars(vs);
            for (const auto& v : vs) {
                auto it = env.find(v);
                if (it == env.end())
                    return std::nullopt;
                m.emplace(v, it->second);
            }
            r = replace_vars(t, m);
        }
        return canonical(r);
    }

    static Match match(const Term& pat, const Term& val, Env& env)
    {
        if (pat.is_var()) {
            auto it = env.find(pat.name());
            if (it != env.end())
                return it->second == val ? Match::Yes : Match::No;
            env.emplace(pat.name(), val);
            return Match::Yes;
        }
        if (pat.is(TermKind::Pair)) {
            if (!val.is(TermKind::Pair))
                return Match::No;
            Match m = match(pat.lhs(), val.lhs(), env);
            if (m != Match::Yes)
                return m;
            return match(pat.rhs(), val.rhs(), env);
        }
        auto v = value(pat, env);
        if (!v)
            return Match::Unknown;
        return *v == val ? Match::Yes : Match::No;
    }

    template <class F>
    static Truth set_pred(const Term& s, F f)
    {
        if (!s.is_set_term())
            return Truth::False;
        return from_bool(f());
    }

    static Truth un(const std::vector<Term>& a)
    {
        auto x = members(a[0]);
        auto y = members(a[1]);
        auto z = members(a[2]);
        if (!x || !y || !z)
            return Truth::False;
        std::vector<Term> u;
        std::set_union(x->begin(), x->end(), y->begin(), y->end(), std::back_inserter(u));
        return from_bool(u == *z);
    }

    static Truth disj(const std::vector<Term>& a)
    {
        auto x = members(a[0]);
        auto y = members(a[1]);
        if (!x || !y)
            return Truth::False;
        for (const Term& e : *x)
            if (contains(*y, e))
                return Truth::False;
        return Truth::True;
    }

    static Truth subset(const std::vector<Term>& a)
    {
        auto x = members(a[0]);
        auto y = members(a[1]);
        if (!x || !y)
            return Truth::False;
        return from_bool(std::includes(y->begin(), y->end(), x->begin(), x->end()));
    }

    static std::optional<std::vector<Term>> pairs(const Term& r)
    {
        auto m = members(r);
        if (!m)
            return std::nullopt;
        for (const Term& e : *m)
            if (!e.is(TermKind::Pair))
                return std::nullopt;
        return m;
    }

    static Truth comp(const std::vector<Term>& a)
    {
        auto r = pairs(a[0]);
        auto s = members(a[1]);
        auto t = pairs(a[2]);
        if (!r || !s || !t)
            return Truth::False;
        std::vector<Term> prod;
        for (const Term& x : *r) {
            for (const Term& y : *s) {
                if (!y.is(TermKind::Pair))
                    return Truth::False;
                if (x.rhs() == y.lhs())
                    prod.push_back(Term::pair(x.lhs(), y.rhs()));
            }
        }
        std::sort(prod.begin(), prod.end());
        prod.erase(std::unique(prod.begin(), prod.end()), prod.end());
        return from_bool(prod == *t);
    }

    static Truth inv(const std::vector<Term>& a)
    {
        auto r = pairs(a[0]);
        auto s = pairs(a[1]);
        if (!r || !s)
            return Truth::False;
        std::vector<Term> flipped;
        for (const Term& p : *r)
            flipped.push_back(Term::pair(p.rhs(), p.lhs()));
        std::sort(flipped.begin(), flipped.end());
        return from_bool(flipped == *s);
    }

    static Truth id(const std::vector<Term>& a)
    {
        auto x = members(a[0]);
        auto r = pairs(a[1]);
        if (!x || !r)
            return Truth::False;
        std::vector<Term> diag;
        for (const Term& e : *x)
            diag.push_back(Term::pair(e, e));
        std::sort(diag.begin(), diag.end());
        return from_bool(diag == *r);
    }

    static Truth pfun(const Term& f)
    {
        auto r = pairs(f);
        if (!r)
            return Truth::False;
        for (std::size_t i = 1; i < r->size(); ++i)
            if ((*r)[i - 1].lhs() == (*r)[i].lhs())
                return Truth::False;
        return Truth::True;
    }

    static Truth dom_ran(const std::vector<Term>& a, bool dom)
    {
        auto r = pairs(a[0]);
        auto d = members(a[1]);
        if (!r || !d)
            return Truth::False;
        std::vector<Term> proj;
        for (const Term& p : *r)
            proj.push_back(dom ? p.lhs() : p.rhs());
        std::sort(proj.begin(), proj.end());
        proj.erase(std::unique(proj.begin(), proj.end()), proj.end());
        return from_bool(proj == *d);
    }

    static Truth apply_to(const std::vector<Term>& a)
    {
        auto r = pairs(a[0]);
        if (!r)
            return Truth::False;
        std::optional<Term> image;
        for (const Term& p : *r) {
            if (p.lhs() == a[1]) {
                if (image)
                    return Truth::False;
                image = p.rhs();
            }
        }
        return from_bool(image && *image == a[2]);
    }

    static Truth foplus(const std::vector<Term>& a)
    {
        auto r = pairs(a[0]);
        auto g = members(a[3]);
        if (!r || !g)
            return Truth::False;
        std::vector<Term> out;
        int hits = 0;
        for (const Term& p : *r) {
            if (p.lhs() == a[1])
                ++hits;
            else
                out.push_back(p);
        }
        if (hits > 1)
            return Truth::False;
        out.push_back(Term::pair(a[1], a[2]));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return from_bool(out == *g);
    }

    static void flatten(const Formula& f, std::vector<Formula>& out)
    {
        if (f.is(FKind::And)) {
            flatten(f.left(), out);
            flatten(f.right(), out);
        } else if (!f.is(FKind::True)) {
            out.push_back(f);
        }
    }

    static bool mentions(const Formula& f, const std::set<std::string>& unbound)
    {
        if (unbound.empty())
            return false;
        std::vector<std::string> vs;
        free_vars(f, vs);
        for (const auto& v : vs)
            if (unbound.count(v))
                return true;
        return false;
    }

    static bool is_unbound_var(const Term& t, const std::set<std::string>& unbound)
    {
        return t.is_var() && unbound.count(t.name());
    }

    // Exists an assignment of `unbound` making every part true?
    Truth search(std::vector<Formula> parts, Env env, std::set<std::string> unbound)
    {
        bool unknown = false;
        // Check fully bound parts first.
        for (std::size_t i = 0; i < parts.size();) {
            if (mentions(parts[i], unbound)) {
                ++i;
                continue;
            }
            Truth t = formula(parts[i], env);
            if (t == Truth::False)
                return t;
            if (t == Truth::Unknown)
                unknown = true;
            parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(i));
        }
        if (parts.empty())
            return unknown ? Truth::Unknown : Truth::True;

        for (std::size_t i = 0; i < parts.size(); ++i) {
            const Formula& p = parts[i];
            if (!p.is(FKind::Atom))
                continue;
            const Constraint& c = p.constraint();
            std::vector<Formula> rest = parts;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));

            auto bind_and_go = [&](Env e2) -> Truth {
                std::set<std::string> u2;
                for (const auto& v : unbound)
                    if (!e2.count(v))
                        u2.insert(v);
                return search(rest, std::move(e2), std::move(u2));
            };
            auto combine = [&](Truth t) {
                if (t == Truth::Unknown)
                    unknown = true;
                return t;
            };

            if (c.kind == CKind::In) {
                auto set = value(c.args[1], env);
                if (!set)
                    continue;
                auto ms = members(*set);
                if (!ms) {
                    if (set->is_set_term())
                        continue;
                    return Truth::False;
                }
                for (const Term& m : *ms) {
                    Env e2 = env;
                    Match mm = match(c.args[0], m, e2);
                    if (mm == Match::Unknown) {
                        unknown = true;
                        continue;
                    }
                    if (mm == Match::No)
                        continue;
                    if (combine(bind_and_go(std::move(e2))) == Truth::True)
                        return Truth::True;
                }
                return unknown ? Truth::Unknown : Truth::False;
            }
            if (c.kind == CKind::Eq || c.kind == CKind::Is) {
                for (int side = 0; side < 2; ++side) {
                    if (c.kind == CKind::Is && side == 1)
                        break;
                    const Term& lhs = c.args[side];
                    const Term& rhs = c.args[1 - side];
                    if (!is_unbound_var(lhs, unbound))
                        continue;
                    auto v = value(rhs, env);
                    if (!v)
                        continue;
                    Term bound = *v;
                    if (c.kind == CKind::Is) {
                        auto n = eval_int(bound);
                        if (!n)
                            return Truth::False;
                        bound = Term::integer(*n);
                    }
                    Env e2 = env;
                    e2.emplace(lhs.name(), bound);
                    return combine(bind_and_go(std::move(e2)));
                }
                continue;
            }
            if (c.kind == CKind::ApplyTo && is_unbound_var(c.args[2], unbound)) {
                auto f = value(c.args[0], env);
                auto x = value(c.args[1], env);
                if (!f || !x)
                    continue;
                auto r = pairs(*f);
                if (!r)
                    return Truth::False;
                std::optional<Term> image;
                for (const Term& q : *r) {
                    if (q.lhs() == *x) {
                        if (image)
                            return Truth::False;
                        image = q.rhs();
                    }
                }
                if (!image)
                    return Truth::False;
                Env e2 = env;
                e2.emplace(c.args[2].name(), *image);
                return combine(bind_and_go(std::move(e2)));
            }
        }
        return Truth::Unknown;
    }

    Truth quant(const Constraint& c, const Env& env)
    {
        const Quant& q = *c.q;
        auto dom = value(q.domain, env);
        if (!dom)
            return Truth::Unknown;
        auto ms = members(*dom);
        if (!ms)
            return dom->is_set_term() ? Truth::Unknown : Truth::False;
        bool forall = c.kind == CKind::Foreach;
        std::vector<std::string> bound = bound_vars(q);
        Env base = env;
        for (const auto& v : bound)
            base.erase(v);
        std::vector<Formula> parts;
        flatten(q.func, parts);
        flatten(q.body, parts);
        std::set<std::string> locals(q.locals.begin(), q.locals.end());
        bool unknown = false;
        for (const Term& m : *ms) {
            Env e2 = base;
            Match mm = match(q.ctrl, m, e2);
            Truth t;
            if (mm == Match::Unknown)
                t = Truth::Unknown;
            else if (mm == Match::No)
                t = Truth::False;
            else
                t = search(parts, std::move(e2), locals);
            if (forall && t == Truth::False)
                return t;
            if (!forall && t == Truth::True)
                return t;
            if (t == Truth::Unknown)
                unknown = true;
        }
        if (unknown)
            return Truth::Unknown;
        return forall ? Truth::True : Truth::False;
    }

    Truth call(const Formula& f, const Env& env)
    {
        if (f.name() == kDecPredicate)
            return Truth::True;
        if (!prog_ || depth_ > kMaxCallDepth)
            return Truth::Unknown;
        std::vector<Term> args;
        for (const Term& t : f.args()) {
            auto v = value(t, env);
            if (!v)
                return Truth::Unknown;
            args.push_back(*v);
        }
        auto clauses = prog_->clauses_of(f.name(), args.size());
        if (clauses.empty())
            return Truth::Unknown;
        ++depth_;
        bool unknown = false;
        Truth result = Truth::False;
        for (const Clause* cl : clauses) {
            Env e2;
            Match mm = Match::Yes;
            for (std::size_t i = 0; i < args.size() && mm == Match::Yes; ++i)
                mm = match(cl->params[i], args[i], e2);
            if (mm == Match::No)
                continue;
            if (mm == Match::Unknown) {
                unknown = true;
                continue;
            }
            std::vector<std::string> body_vars;
            free_vars(cl->body, body_vars);
            std::set<std::string> unbound;
            for (const auto& v : body_vars)
                if (!e2.count(v))
                    unbound.insert(v);
            std::vector<Formula> parts;
            flatten(cl->body, parts);
            Truth t = search(parts, std::move(e2), std::move(unbound));
            if (t == Truth::True) {
                result = t;
                break;
            }
            if (t == Truth::Unknown)
                unknown = true;
        }
        --depth_;
        if (result == Truth::True)
            return result;
        return unknown ? Truth::Unknown : Truth::False;
    }
};

}  // namespace

bool ground_member(const Term& elem, const Term& set)
{
    Term s = canonical(set);
    Term e = canonical(elem);
    if (s.is(TermKind::Interval)) {
        return e.is(TermKind::Int) && s.lhs().is(TermKind::Int) && s.rhs().is(TermKind::Int) &&
               s.lhs().value() <= e.value() && e.value() <= s.rhs().value();
    }
    std::vector<Term> ms;
    if (!ground_members(s, ms))
        return false;
    return contains(ms, e);
}

Truth evaluate(const Formula& f, const Env& env, const Program* prog)
{
    Evaluator ev(prog);
    return ev.formula(f, env);
}

Truth evaluate(const Constraint& c, const Env& env, const Program* prog)
{
    Evaluator ev(prog);
    return ev.constraint(c, env);
}

}  // namespace setsolve
