#pragma once

// Brute-force reference semantics over explicit finite values. Shares only
// the AST with the library; evaluation and enumeration are written from the
// set-theoretic definitions.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "setsolve/formula.hpp"
#include "setsolve/parser.hpp"

namespace oracle {

using setsolve::CKind;
using setsolve::FKind;
using setsolve::Formula;
using setsolve::Term;
using setsolve::TermKind;

struct Val {
    enum class K { Atom, Int, Pair, Set } k = K::Atom;
    std::string a;
    std::int64_t i = 0;
    std::vector<Val> xs;  // pair: exactly two, set: sorted and unique

    static Val atom(std::string s) { return {K::Atom, std::move(s), 0, {}}; }
    static Val num(std::int64_t v) { return {K::Int, {}, v, {}}; }
    static Val pair(Val x, Val y) { return {K::Pair, {}, 0, {std::move(x), std::move(y)}}; }
    static Val set(std::vector<Val> e)
    {
        std::sort(e.begin(), e.end());
        e.erase(std::unique(e.begin(), e.end()), e.end());
        return {K::Set, {}, 0, std::move(e)};
    }

    [[nodiscard]] bool contains(const Val& e) const { return std::binary_search(xs.begin(), xs.end(), e); }

    friend bool operator<(const Val& x, const Val& y)
    {
        if (x.k != y.k)
            return x.k < y.k;
        if (x.a != y.a)
            return x.a < y.a;
        if (x.i != y.i)
            return x.i < y.i;
        return std::lexicographical_compare(x.xs.begin(), x.xs.end(), y.xs.begin(), y.xs.end());
    }
    friend bool operator==(const Val& x, const Val& y)
    {
        return x.k == y.k && x.a == y.a && x.i == y.i && x.xs == y.xs;
    }
    friend bool operator!=(const Val& x, const Val& y) { return !(x == y); }
};

inline std::string show(const Val& v)
{
    switch (v.k) {
    case Val::K::Atom:
        return v.a;
    case Val::K::Int:
        return std::to_string(v.i);
    case Val::K::Pair:
        return "[" + show(v.xs[0]) + "," + show(v.xs[1]) + "]";
    case Val::K::Set: {
        std::string s = "{";
        for (std::size_t n = 0; n < v.xs.size(); ++n)
            s += (n ? "," : "") + show(v.xs[n]);
        return s + "}";
    }
    }
    return "?";
}

/// Back to a library term, for feeding values into the solver.
inline Term to_term(const Val& v)
{
    switch (v.k) {
    case Val::K::Atom:
        return Term::atom(v.a);
    case Val::K::Int:
        return Term::integer(v.i);
    case Val::K::Pair:
        return Term::pair(to_term(v.xs[0]), to_term(v.xs[1]));
    case Val::K::Set: {
        std::vector<Term> e;
        for (const auto& x : v.xs)
            e.push_back(to_term(x));
        return Term::set_of(e);
    }
    }
    return {};
}

/// Value of a ground library term.
inline Val from_term(const Term& t)
{
    switch (t.kind()) {
    case TermKind::Atom:
        return Val::atom(t.name());
    case TermKind::Int:
        return Val::num(t.value());
    case TermKind::Pair:
        return Val::pair(from_term(t.lhs()), from_term(t.rhs()));
    case TermKind::Empty:
        return Val::set({});
    case TermKind::ExtSet: {
        Val rest = from_term(t.tail());
        rest.xs.push_back(from_term(t.head()));
        return Val::set(rest.xs);
    }
    default:
        throw std::runtime_error("not a ground value: " + setsolve::to_string(t));
    }
}

using Env = std::map<std::string, Val>;

struct Undefined : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::int64_t arith(const Term& t, const Env& env);

inline Val value(const Term& t, const Env& env)
{
    switch (t.kind()) {
    case TermKind::Var: {
        auto it = env.find(t.name());
        if (it == env.end())
            throw Undefined("unbound " + t.name());
        return it->second;
    }
    case TermKind::Atom:
        return Val::atom(t.name());
    case TermKind::Int:
        return Val::num(t.value());
    case TermKind::Pair:
        return Val::pair(value(t.lhs(), env), value(t.rhs(), env));
    case TermKind::Empty:
        return Val::set({});
    case TermKind::ExtSet: {
        Val rest = value(t.tail(), env);
        if (rest.k != Val::K::Set)
            throw Undefined("set tail is not a set");
        rest.xs.push_back(value(t.head(), env));
        return Val::set(rest.xs);
    }
    case TermKind::CP: {
        Val l = value(t.lhs(), env), r = value(t.rhs(), env);
        std::vector<Val> out;
        for (const auto& x : l.xs)
            for (const auto& y : r.xs)
                out.push_back(Val::pair(x, y));
        return Val::set(out);
    }
    case TermKind::Interval: {
        std::vector<Val> out;
        for (auto n = arith(t.lhs(), env); n <= arith(t.rhs(), env); ++n)
            out.push_back(Val::num(n));
        return Val::set(out);
    }
    case TermKind::Arith:
        return Val::num(arith(t, env));
    default:
        throw Undefined("unsupported term");
    }
}

inline std::int64_t arith(const Term& t, const Env& env)
{
    if (t.is(TermKind::Arith)) {
        auto a = arith(t.lhs(), env), b = arith(t.rhs(), env);
        switch (t.op()) {
        case '+':
            return a + b;
        case '-':
            return a - b;
        case '*':
            return a * b;
        }
        throw Undefined("operator");
    }
    Val v = value(t, env);
    if (v.k != Val::K::Int)
        throw Undefined("not an integer");
    return v.i;
}

inline bool relation(const Val& r)
{
    if (r.k != Val::K::Set)
        return false;
    return std::all_of(r.xs.begin(), r.xs.end(), [](const Val& p) { return p.k == Val::K::Pair; });
}

inline std::vector<Val> images(const Val& f, const Val& x)
{
    std::vector<Val> out;
    for (const auto& p : f.xs)
        if (p.xs[0] == x)
            out.push_back(p.xs[1]);
    return out;
}

/// Binds the variables of a quantifier pattern against an element.
inline bool match(const Term& pat, const Val& v, Env& env)
{
    if (pat.is_var()) {
        env[pat.name()] = v;
        return true;
    }
    if (pat.is(TermKind::Pair)) {
        if (v.k != Val::K::Pair)
            return false;
        return match(pat.lhs(), v.xs[0], env) && match(pat.rhs(), v.xs[1], env);
    }
    return value(pat, env) == v;
}

inline bool holds(const Formula& f, const Env& env);

inline bool holds(const setsolve::Constraint& c, const Env& env)
{
    if (c.kind == CKind::Foreach || c.kind == CKind::Exists) {
        const auto& q = *c.q;
        if (!q.locals.empty())
            throw Undefined("quantifier locals");
        Val d = value(q.domain, env);
        bool all = c.kind == CKind::Foreach;
        for (const auto& e : d.xs) {
            Env inner = env;
            if (!match(q.ctrl, e, inner))
                continue;
            bool b = holds(q.body, inner);
            if (all && !b)
                return false;
            if (!all && b)
                return true;
        }
        return all;
    }
    std::vector<Val> a;
    for (const auto& t : c.args)
        a.push_back(value(t, env));
    auto rel = [&](std::initializer_list<std::size_t> idx) {
        for (auto n : idx)
            if (!relation(a[n]))
                return false;
        return true;
    };
    auto sets = [&](std::initializer_list<std::size_t> idx) {
        for (auto n : idx)
            if (a[n].k != Val::K::Set)
                return false;
        return true;
    };
    switch (c.kind) {
    case CKind::Eq:
        return a[0] == a[1];
    case CKind::Neq:
        return a[0] != a[1];
    case CKind::In:
        return sets({1}) && a[1].contains(a[0]);
    case CKind::Nin:
        return sets({1}) && !a[1].contains(a[0]);
    case CKind::Un:
    case CKind::Nun: {
        if (!sets({0, 1, 2}))
            return false;
        std::vector<Val> u = a[0].xs;
        u.insert(u.end(), a[1].xs.begin(), a[1].xs.end());
        return (Val::set(u) == a[2]) == (c.kind == CKind::Un);
    }
    case CKind::Disj:
    case CKind::Ndisj: {
        if (!sets({0, 1}))
            return false;
        bool d = std::none_of(a[0].xs.begin(), a[0].xs.end(), [&](const Val& x) { return a[1].contains(x); });
        return d == (c.kind == CKind::Disj);
    }
    case CKind::Subset:
    case CKind::Nsubset: {
        if (!sets({0, 1}))
            return false;
        bool s = std::all_of(a[0].xs.begin(), a[0].xs.end(), [&](const Val& x) { return a[1].contains(x); });
        return s == (c.kind == CKind::Subset);
    }
    case CKind::Comp:
    case CKind::Ncomp: {
        if (!rel({0, 1, 2}))
            return false;
        std::vector<Val> out;
        for (const auto& p : a[0].xs)
            for (const auto& q : a[1].xs)
                if (p.xs[1] == q.xs[0])
                    out.push_back(Val::pair(p.xs[0], q.xs[1]));
        return (Val::set(out) == a[2]) == (c.kind == CKind::Comp);
    }
    case CKind::Inv:
    case CKind::Ninv: {
        if (!rel({0, 1}))
            return false;
        std::vector<Val> out;
        for (const auto& p : a[0].xs)
            out.push_back(Val::pair(p.xs[1], p.xs[0]));
        return (Val::set(out) == a[1]) == (c.kind == CKind::Inv);
    }
    case CKind::Id:
    case CKind::Nid: {
        if (!sets({0}) || !rel({1}))
            return false;
        std::vector<Val> out;
        for (const auto& x : a[0].xs)
            out.push_back(Val::pair(x, x));
        return (Val::set(out) == a[1]) == (c.kind == CKind::Id);
    }
    case CKind::Dom:
    case CKind::Ndom:
    case CKind::Ran:
    case CKind::Nran: {
        if (!rel({0}) || !sets({1}))
            return false;
        bool dom = c.kind == CKind::Dom || c.kind == CKind::Ndom;
        std::vector<Val> out;
        for (const auto& p : a[0].xs)
            out.push_back(p.xs[dom ? 0 : 1]);
        bool pos = c.kind == CKind::Dom || c.kind == CKind::Ran;
        return (Val::set(out) == a[1]) == pos;
    }
    case CKind::Pfun:
    case CKind::Npfun: {
        if (!rel({0}))
            return false;
        bool fn = true;
        for (const auto& p : a[0].xs)
            if (images(a[0], p.xs[0]).size() > 1)
                fn = false;
        return fn == (c.kind == CKind::Pfun);
    }
    case CKind::ApplyTo: {
        if (!rel({0}))
            return false;
        auto im = images(a[0], a[1]);
        return im.size() == 1 && im[0] == a[2];
    }
    case CKind::Foplus: {
        if (!rel({0, 3}))
            return false;
        if (images(a[0], a[1]).size() > 1)
            return false;
        std::vector<Val> out;
        for (const auto& p : a[0].xs)
            if (p.xs[0] != a[1])
                out.push_back(p);
        out.push_back(Val::pair(a[1], a[2]));
        return Val::set(out) == a[3];
    }
    case CKind::Le:
    case CKind::Lt:
        if (a[0].k != Val::K::Int || a[1].k != Val::K::Int)
            return false;
        return c.kind == CKind::Le ? a[0].i <= a[1].i : a[0].i < a[1].i;
    case CKind::Is:
        return a[0].k == Val::K::Int && a[0].i == arith(c.args[1], env);
    default:
        throw Undefined("constraint");
    }
}

inline bool holds(const Formula& f, const Env& env)
{
    switch (f.kind()) {
    case FKind::True:
        return true;
    case FKind::False:
        return false;
    case FKind::Atom:
        return holds(f.constraint(), env);
    case FKind::And:
        return holds(f.left(), env) && holds(f.right(), env);
    case FKind::Or:
        return holds(f.left(), env) || holds(f.right(), env);
    case FKind::Neg:
        return !holds(f.left(), env);
    case FKind::Implies:
        return !holds(f.left(), env) || holds(f.right(), env);
    default:
        throw Undefined("formula kind");
    }
}

/// All subsets of `u`.
inline std::vector<Val> powerset(const std::vector<Val>& u)
{
    std::vector<Val> out;
    for (std::uint32_t m = 0; m < (1u << u.size()); ++m) {
        std::vector<Val> s;
        for (std::size_t n = 0; n < u.size(); ++n)
            if (m & (1u << n))
                s.push_back(u[n]);
        out.push_back(Val::set(s));
    }
    return out;
}

enum class Sort { Elem, Set, Rel, Int };

/// Finite universe of each sort. Random formulas restrict every variable to
/// exactly this universe, so enumerating it decides satisfiability.
struct Universe {
    std::vector<Val> atoms{Val::atom("a"), Val::atom("b"), Val::atom("c")};
    std::vector<Val> rel_base{Val::atom("a"), Val::atom("b")};
    std::int64_t lo = -4, hi = 4;

    [[nodiscard]] std::vector<Val> domain(Sort s) const
    {
        switch (s) {
        case Sort::Elem:
            return atoms;
        case Sort::Set:
            return powerset(atoms);
        case Sort::Rel: {
            std::vector<Val> pairs;
            for (const auto& x : rel_base)
                for (const auto& y : rel_base)
                    pairs.push_back(Val::pair(x, y));
            return powerset(pairs);
        }
        case Sort::Int: {
            std::vector<Val> out;
            for (auto n = lo; n <= hi; ++n)
                out.push_back(Val::num(n));
            return out;
        }
        }
        return {};
    }
};

/// Exhaustive search for a model; returns the first one found.
inline std::optional<Env> brute_force(const Formula& f, const std::map<std::string, Sort>& vars,
                                      const Universe& u = {})
{
    std::vector<std::pair<std::string, std::vector<Val>>> doms;
    for (const auto& [v, s] : vars)
        doms.emplace_back(v, u.domain(s));
    Env env;
    std::function<bool(std::size_t)> go = [&](std::size_t n) {
        if (n == doms.size())
            return holds(f, env);
        for (const auto& v : doms[n].second) {
            env[doms[n].first] = v;
            if (go(n + 1))
                return true;
        }
        return false;
    };
    if (go(0))
        return env;
    return std::nullopt;
}

/// Random well-sorted formulas over a bounded fragment.
class Generator {
public:
    explicit Generator(std::uint32_t seed) : rng_(seed) {}

    struct Case {
        Formula formula;  // includes the domain restrictions
        std::map<std::string, Sort> vars;
    };

    Case formula(int max_constraints = 5, int max_depth = 2)
    {
        vars_.clear();
        int budget = 1 + pick(max_constraints);
        Formula body = tree(budget, max_depth);
        std::vector<Formula> parts{body};
        Universe u;
        for (const auto& [v, s] : vars_) {
            Term x = Term::var(v);
            switch (s) {
            case Sort::Elem:
                parts.push_back(Formula::atom(CKind::In, {x, lit(Val::set(u.atoms))}));
                break;
            case Sort::Set:
                parts.push_back(Formula::atom(CKind::Subset, {x, lit(Val::set(u.atoms))}));
                break;
            case Sort::Rel:
                parts.push_back(Formula::atom(CKind::Subset, {x, Term::cp(lit(Val::set(u.rel_base)),
                                                                          lit(Val::set(u.rel_base)))}));
                break;
            case Sort::Int:
                parts.push_back(Formula::atom(CKind::In, {x, Term::interval(Term::integer(u.lo),
                                                                            Term::integer(u.hi))}));
                break;
            }
        }
        return {Formula::conj(parts), vars_};
    }

    /// Conjunction of two random formulas; tilts the mix towards unsatisfiable.
    Case conjunction(int max_constraints = 5, int max_depth = 2)
    {
        Case a = formula(max_constraints, max_depth);
        Case b = formula(max_constraints, max_depth);
        a.vars.insert(b.vars.begin(), b.vars.end());
        return {Formula::conj(a.formula, b.formula), a.vars};
    }

    /// One random constraint with ground arguments drawn from the universe.
    Formula ground(CKind k)
    {
        ground_ = true;
        Formula f = constraint(k);
        ground_ = false;
        return f;
    }

    Val random_value(Sort s)
    {
        auto d = Universe{}.domain(s);
        return d[pick(static_cast<int>(d.size()))];
    }

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

private:
    std::mt19937 rng_;
    std::map<std::string, Sort> vars_;
    bool ground_ = false;

    static Term lit(const Val& v) { return to_term(v); }

    Formula tree(int& budget, int depth)
    {
        if (depth == 0 || budget <= 1 || pick(3) == 0) {
            --budget;
            return constraint(random_kind());
        }
        int op = pick(6);
        if (op >= 4)
            return Formula::neg(tree(budget, depth - 1));
        Formula l = tree(budget, depth - 1);
        Formula r = budget > 0 ? tree(budget, depth - 1) : constraint(random_kind());
        return op < 3 ? Formula::conj(l, r) : Formula::disj(l, r);
    }

    CKind random_kind()
    {
        static const CKind kinds[] = {
            CKind::Eq,     CKind::Neq,   CKind::In,   CKind::Nin,   CKind::Un,      CKind::Nun,
            CKind::Disj,   CKind::Ndisj, CKind::Subset, CKind::Nsubset, CKind::Comp, CKind::Ncomp,
            CKind::Inv,    CKind::Ninv,  CKind::Id,   CKind::Nid,   CKind::Dom,     CKind::Ndom,
            CKind::Ran,    CKind::Nran,  CKind::Pfun, CKind::Npfun, CKind::ApplyTo, CKind::Le,
            CKind::Lt,     CKind::Is,    CKind::Foreach, CKind::Exists,
        };
        return kinds[pick(static_cast<int>(std::size(kinds)))];
    }

    Term term(Sort s)
    {
        if (ground_ || pick(4) == 0) {
            if (s == Sort::Set && !ground_ && pick(2) == 0)
                return Term::set_of({term(Sort::Elem)}, pick(2) ? Term::empty() : term(Sort::Set));
            return lit(random_value(s));
        }
        static const char* names[] = {"E", "S", "R", "I"};
        std::string v = std::string(names[static_cast<int>(s)]) + std::to_string(1 + pick(2));
        vars_[v] = s;
        return Term::var(v);
    }

    Formula constraint(CKind k)
    {
        auto E = [&] { return term(Sort::Elem); };
        auto S = [&] { return term(Sort::Set); };
        auto R = [&] { return term(Sort::Rel); };
        auto I = [&] { return term(Sort::Int); };
        switch (k) {
        case CKind::Eq:
        case CKind::Neq: {
            Sort s = static_cast<Sort>(pick(4));
            return Formula::atom(k, {term(s), term(s)});
        }
        case CKind::In:
        case CKind::Nin:
            return Formula::atom(k, {E(), S()});
        case CKind::Un:
        case CKind::Nun:
            return Formula::atom(k, {S(), S(), S()});
        case CKind::Disj:
        case CKind::Ndisj:
        case CKind::Subset:
        case CKind::Nsubset:
            return Formula::atom(k, {S(), S()});
        case CKind::Comp:
        case CKind::Ncomp:
            return Formula::atom(k, {R(), R(), R()});
        case CKind::Inv:
        case CKind::Ninv:
            return Formula::atom(k, {R(), R()});
        case CKind::Id:
        case CKind::Nid:
            return Formula::atom(k, {rel_base_set(), R()});
        case CKind::Dom:
        case CKind::Ndom:
        case CKind::Ran:
        case CKind::Nran:
            return Formula::atom(k, {R(), rel_base_set()});
        case CKind::Pfun:
        case CKind::Npfun:
            return Formula::atom(k, {R()});
        case CKind::ApplyTo:
            return Formula::atom(k, {R(), rel_elem(), rel_elem()});
        case CKind::Le:
        case CKind::Lt:
            return Formula::atom(k, {I(), I()});
        case CKind::Is:
            return Formula::atom(k, {I(), Term::arith(pick(2) ? '+' : '-', I(), I())});
        case CKind::Foreach:
        case CKind::Exists: {
            std::string x = "Q" + std::to_string(pick(1000));
            Term qx = Term::var(x);
            Formula body = pick(2) ? Formula::atom(CKind::In, {qx, S()}) : Formula::atom(CKind::Neq, {qx, E()});
            return Formula::atom(setsolve::make_quant(k, qx, S(), {}, body));
        }
        default:
            throw std::logic_error("kind not generated");
        }
    }

    // Arguments that must stay inside the relation base for dom/ran/id.
    Term rel_base_set()
    {
        auto subsets = powerset(Universe{}.rel_base);
        return lit(subsets[pick(static_cast<int>(subsets.size()))]);
    }
    Term rel_elem()
    {
        const auto& b = Universe{}.rel_base;
        if (!ground_ && pick(2) == 0) {
            std::string v = "E" + std::to_string(1 + pick(2));
            vars_[v] = Sort::Elem;
            return Term::var(v);
        }
        return lit(b[pick(static_cast<int>(b.size()))]);
    }
};

}  // namespace oracle
