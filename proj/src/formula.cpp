#include "setsolve/formula.hpp"

#include <algorithm>
#include <sstream>

namespace setsolve {

struct FormulaFactory {
    static Formula wrap(std::shared_ptr<const FormulaNode> n) { return Formula(std::move(n)); }
};

namespace {

std::uint64_t term_mask(const std::vector<Term>& ts)
{
    std::uint64_t m = 0;
    for (const Term& t : ts)
        m |= t.var_mask();
    return m;
}

std::uint64_t constraint_mask(const Constraint& c)
{
    std::uint64_t m = term_mask(c.args);
    if (c.q)
        m |= c.q->mask;
    return m;
}

Formula make(FormulaNode n)
{
    switch (n.kind) {
    case FKind::Atom:
        n.mask = constraint_mask(n.c);
        break;
    case FKind::Call:
        n.mask = term_mask(n.args);
        break;
    default:
        n.mask = n.a.var_mask() | n.b.var_mask();
        break;
    }
    return FormulaFactory::wrap(std::make_shared<const FormulaNode>(std::move(n)));
}

}  // namespace

const char* ckind_name(CKind k)
{
    switch (k) {
    case CKind::Eq: return "=";
    case CKind::Neq: return "neq";
    case CKind::In: return "in";
    case CKind::Nin: return "nin";
    case CKind::Un: return "un";
    case CKind::Nun: return "nun";
    case CKind::Disj: return "disj";
    case CKind::Ndisj: return "ndisj";
    case CKind::Subset: return "subset";
    case CKind::Nsubset: return "nsubset";
    case CKind::Comp: return "comp";
    case CKind::Ncomp: return "ncomp";
    case CKind::Inv: return "inv";
    case CKind::Ninv: return "ninv";
    case CKind::Id: return "id";
    case CKind::Nid: return "nid";
    case CKind::Pfun: return "pfun";
    case CKind::Npfun: return "npfun";
    case CKind::Dom: return "dom";
    case CKind::Ndom: return "ndom";
    case CKind::Ran: return "ran";
    case CKind::Nran: return "nran";
    case CKind::ApplyTo: return "applyTo";
    case CKind::Foplus: return "foplus";
    case CKind::Le: return "=<";
    case CKind::Lt: return "<";
    case CKind::Is: return "is";
    case CKind::Foreach: return "foreach";
    case CKind::Exists: return "exists";
    }
    return "?";
}

std::size_t ckind_arity(CKind k)
{
    switch (k) {
    case CKind::Pfun:
    case CKind::Npfun:
        return 1;
    case CKind::Un:
    case CKind::Nun:
    case CKind::Comp:
    case CKind::Ncomp:
    case CKind::ApplyTo:
        return 3;
    case CKind::Foplus:
        return 4;
    case CKind::Foreach:
    case CKind::Exists:
        return 0;
    default:
        return 2;
    }
}

bool operator==(const Constraint& a, const Constraint& b)
{
    if (a.kind != b.kind || a.args != b.args)
        return false;
    if (a.q == b.q)
        return true;
    if (!a.q || !b.q)
        return false;
    return a.q->ctrl == b.q->ctrl && a.q->domain == b.q->domain && a.q->locals == b.q->locals &&
           to_string(a.q->body) == to_string(b.q->body) && to_string(a.q->func) == to_string(b.q->func);
}

Formula Formula::truth()
{
    FormulaNode n;
    n.kind = FKind::True;
    static const Formula t = make(std::move(n));
    return t;
}

Formula Formula::falsity()
{
    FormulaNode n;
    n.kind = FKind::False;
    static const Formula f = make(std::move(n));
    return f;
}

Formula Formula::atom(Constraint c, Span s)
{
    FormulaNode n;
    n.kind = FKind::Atom;
    n.c = std::move(c);
    n.span = s;
    return make(std::move(n));
}

Formula Formula::atom(CKind k, std::vector<Term> args, Span s)
{
    return atom(Constraint{k, std::move(args), nullptr}, s);
}

Formula Formula::conj(Formula a, Formula b)
{
    if (a.is(FKind::True))
        return b;
    if (b.is(FKind::True))
        return a;
    if (a.is(FKind::False) || b.is(FKind::False))
        return falsity();
    FormulaNode n;
    n.kind = FKind::And;
    n.a = std::move(a);
    n.b = std::move(b);
    return make(std::move(n));
}

Formula Formula::conj(const std::vector<Formula>& fs)
{
    Formula out = truth();
    for (auto it = fs.rbegin(); it != fs.rend(); ++it)
        out = conj(*it, out);
    return out;
}

Formula Formula::disj(Formula a, Formula b)
{
    if (a.is(FKind::False))
        return b;
    if (b.is(FKind::False))
        return a;
    if (a.is(FKind::True) || b.is(FKind::True))
        return truth();
    FormulaNode n;
    n.kind = FKind::Or;
    n.a = std::move(a);
    n.b = std::move(b);
    return make(std::move(n));
}

Formula Formula::disj(const std::vector<Formula>& fs)
{
    Formula out = falsity();
    for (auto it = fs.rbegin(); it != fs.rend(); ++it)
        out = disj(*it, out);
    return out;
}

Formula Formula::neg(Formula a, Span s)
{
    FormulaNode n;
    n.kind = FKind::Neg;
    n.a = std::move(a);
    n.span = s;
    return make(std::move(n));
}

Formula Formula::implies(Formula a, Formula b, Span s)
{
    FormulaNode n;
    n.kind = FKind::Implies;
    n.a = std::move(a);
    n.b = std::move(b);
    n.span = s;
    return make(std::move(n));
}

Formula Formula::call(std::string name, std::vector<Term> args, Span s)
{
    FormulaNode n;
    n.kind = FKind::Call;
    n.name = std::move(name);
    n.args = std::move(args);
    n.span = s;
    return make(std::move(n));
}

Formula Formula::let(std::vector<std::string> vars, Formula func, Formula body)
{
    if (vars.empty())
        return conj(std::move(func), std::move(body));
    FormulaNode n;
    n.kind = FKind::Let;
    n.vars = std::move(vars);
    n.a = std::move(func);
    n.b = std::move(body);
    return make(std::move(n));
}

FKind Formula::kind() const { return node_->kind; }
const Constraint& Formula::constraint() const { return node_->c; }
const Formula& Formula::left() const { return node_->a; }
const Formula& Formula::right() const { return node_->b; }
const std::string& Formula::name() const { return node_->name; }
const std::vector<Term>& Formula::args() const { return node_->args; }
const std::vector<std::string>& Formula::vars() const { return node_->vars; }
Span Formula::span() const { return node_ ? node_->span : Span{}; }
std::uint64_t Formula::var_mask() const { return node_ ? node_->mask : 0; }

Constraint make_quant(CKind kind, Term ctrl, Term domain, std::vector<std::string> locals, Formula body,
                      Formula func)
{
    auto q = std::make_shared<Quant>();
    q->ctrl = std::move(ctrl);
    q->domain = std::move(domain);
    q->locals = std::move(locals);
    q->body = std::move(body);
    q->func = func ? std::move(func) : Formula::truth();
    q->mask = q->ctrl.var_mask() | q->domain.var_mask() | q->body.var_mask() | q->func.var_mask();
    return Constraint{kind, {}, std::move(q)};
}

std::vector<std::string> bound_vars(const Quant& q)
{
    std::vector<std::string> out;
    q.ctrl.collect_vars(out);
    for (const auto& l : q.locals)
        if (std::find(out.begin(), out.end(), l) == out.end())
            out.push_back(l);
    return out;
}

namespace {

template <class TermFn>
Constraint map_constraint(const Constraint& c, const TermFn& tf);

template <class TermFn>
Formula map_formula(const Formula& f, std::uint64_t mask, const TermFn& tf)
{
    if (!f || (f.var_mask() & mask) == 0)
        return f;
    switch (f.kind()) {
    case FKind::True:
    case FKind::False:
        return f;
    case FKind::Atom:
        return Formula::atom(map_constraint(f.constraint(), tf), f.span());
    case FKind::And:
        return Formula::conj(map_formula(f.left(), mask, tf), map_formula(f.right(), mask, tf));
    case FKind::Or:
        return Formula::disj(map_formula(f.left(), mask, tf), map_formula(f.right(), mask, tf));
    case FKind::Neg:
        return Formula::neg(map_formula(f.left(), mask, tf), f.span());
    case FKind::Implies:
        return Formula::implies(map_formula(f.left(), mask, tf), map_formula(f.right(), mask, tf), f.span());
    case FKind::Call: {
        std::vector<Term> args;
        for (const Term& t : f.args())
            args.push_back(tf(t));
        return Formula::call(f.name(), std::move(args), f.span());
    }
    case FKind::Let:
        return Formula::let(f.vars(), map_formula(f.left(), mask, tf), map_formula(f.right(), mask, tf));
    }
    return f;
}

template <class TermFn>
Constraint map_constraint_masked(const Constraint& c, std::uint64_t mask, const TermFn& tf)
{
    Constraint out{c.kind, {}, nullptr};
    out.args.reserve(c.args.size());
    for (const Term& t : c.args)
        out.args.push_back(tf(t));
    if (c.q) {
        if ((c.q->mask & mask) == 0) {
            out.q = c.q;
        } else {
            Constraint nq = make_quant(c.kind, tf(c.q->ctrl), tf(c.q->domain), c.q->locals,
                                       map_formula(c.q->body, mask, tf), map_formula(c.q->func, mask, tf));
            out.q = nq.q;
        }
    }
    return out;
}

template <class TermFn>
Constraint map_constraint(const Constraint& c, const TermFn& tf)
{
    return map_constraint_masked(c, ~std::uint64_t{0}, tf);
}

std::uint64_t subst_mask(const Substitution& s)
{
    std::uint64_t m = 0;
    for (const auto& kv : s.bindings())
        m |= var_bit(kv.first);
    return m;
}

std::uint64_t map_mask(const std::map<std::string, Term>& m)
{
    std::uint64_t r = 0;
    for (const auto& kv : m)
        r |= var_bit(kv.first);
    return r;
}

}  // namespace

Constraint apply(const Substitution& s, const Constraint& c)
{
    if (s.empty())
        return c;
    std::uint64_t mask = subst_mask(s);
    return map_constraint_masked(c, mask, [&](const Term& t) { return s.apply(t); });
}

Formula apply(const Substitution& s, const Formula& f)
{
    if (s.empty())
        return f;
    std::uint64_t mask = subst_mask(s);
    return map_formula(f, mask, [&](const Term& t) { return s.apply(t); });
}

Constraint replace_vars(const Constraint& c, const std::map<std::string, Term>& m)
{
    if (m.empty())
        return c;
    return map_constraint_masked(c, map_mask(m), [&](const Term& t) { return replace_vars(t, m); });
}

Formula replace_vars(const Formula& f, const std::map<std::string, Term>& m)
{
    if (m.empty())
        return f;
    return map_formula(f, map_mask(m), [&](const Term& t) { return replace_vars(t, m); });
}

namespace {

void free_vars_rec(const Formula& f, std::vector<std::string>& out, const std::vector<std::string>& bound);

void add_term_vars(const Term& t, std::vector<std::string>& out, const std::vector<std::string>& bound)
{
    std::vector<std::string> vs;
    t.collect_vars(vs);
    for (auto& v : vs)
        if (std::find(bound.begin(), bound.end(), v) == bound.end() &&
            std::find(out.begin(), out.end(), v) == out.end())
            out.push_back(v);
}

void constraint_vars(const Constraint& c, std::vector<std::string>& out, const std::vector<std::string>& bound)
{
    for (const Term& t : c.args)
        add_term_vars(t, out, bound);
    if (c.q) {
        add_term_vars(c.q->domain, out, bound);
        std::vector<std::string> inner = bound;
        for (auto& v : bound_vars(*c.q))
            inner.push_back(v);
        free_vars_rec(c.q->func, out, inner);
        free_vars_rec(c.q->body, out, inner);
    }
}

void free_vars_rec(const Formula& f, std::vector<std::string>& out, const std::vector<std::string>& bound)
{
    if (!f)
        return;
    switch (f.kind()) {
    case FKind::True:
    case FKind::False:
        return;
    case FKind::Atom:
        constraint_vars(f.constraint(), out, bound);
        return;
    case FKind::Call:
        for (const Term& t : f.args())
            add_term_vars(t, out, bound);
        return;
    case FKind::Let: {
        std::vector<std::string> inner = bound;
        inner.insert(inner.end(), f.vars().begin(), f.vars().end());
        free_vars_rec(f.left(), out, inner);
        free_vars_rec(f.right(), out, inner);
        return;
    }
    default:
        free_vars_rec(f.left(), out, bound);
        free_vars_rec(f.right(), out, bound);
        return;
    }
}

void print_formula(std::ostream& os, const Formula& f, int prec);

void print_constraint(std::ostream& os, const Constraint& c)
{
    auto infix = [&](const char* op) {
        os << to_string(c.args[0]) << ' ' << op << ' ' << to_string(c.args[1]);
    };
    switch (c.kind) {
    case CKind::Eq: infix("="); return;
    case CKind::Neq: infix("neq"); return;
    case CKind::In: infix("in"); return;
    case CKind::Nin: infix("nin"); return;
    case CKind::Le: infix("=<"); return;
    case CKind::Lt: infix("<"); return;
    case CKind::Is: infix("is"); return;
    case CKind::Foreach:
    case CKind::Exists: {
        const Quant& q = *c.q;
        os << ckind_name(c.kind) << '(' << to_string(q.ctrl) << " in " << to_string(q.domain) << ", ";
        if (!q.locals.empty() || !q.func.is(FKind::True)) {
            os << '[';
            for (std::size_t i = 0; i < q.locals.size(); ++i)
                os << (i ? "," : "") << q.locals[i];
            os << "], ";
        }
        print_formula(os, q.body, 0);
        if (!q.func.is(FKind::True)) {
            os << ", ";
            print_formula(os, q.func, 0);
        }
        os << ')';
        return;
    }
    default:
        os << ckind_name(c.kind) << '(';
        for (std::size_t i = 0; i < c.args.size(); ++i)
            os << (i ? "," : "") << to_string(c.args[i]);
        os << ')';
        return;
    }
}

// Precedence: implies 1, or 2, & 3.
void print_formula(std::ostream& os, const Formula& f, int prec)
{
    switch (f.kind()) {
    case FKind::True:
        os << "true";
        return;
    case FKind::False:
        os << "false";
        return;
    case FKind::Atom:
        print_constraint(os, f.constraint());
        return;
    case FKind::And:
    case FKind::Or:
    case FKind::Implies: {
        int p = f.kind() == FKind::And ? 3 : f.kind() == FKind::Or ? 2 : 1;
        const char* op = f.kind() == FKind::And ? " & " : f.kind() == FKind::Or ? " or " : " implies ";
        if (p < prec)
            os << '(';
        print_formula(os, f.left(), f.kind() == FKind::Implies ? p + 1 : p);
        os << op;
        print_formula(os, f.right(), f.kind() == FKind::Implies ? p : p);
        if (p < prec)
            os << ')';
        return;
    }
    case FKind::Neg:
        os << "neg(";
        print_formula(os, f.left(), 0);
        os << ')';
        return;
    case FKind::Call:
        os << f.name();
        if (!f.args().empty()) {
            os << '(';
            for (std::size_t i = 0; i < f.args().size(); ++i)
                os << (i ? "," : "") << to_string(f.args()[i]);
            os << ')';
        }
        return;
    case FKind::Let:
        os << "let([";
        for (std::size_t i = 0; i < f.vars().size(); ++i)
            os << (i ? "," : "") << f.vars()[i];
        os << "], ";
        print_formula(os, f.left(), 0);
        os << ", ";
        print_formula(os, f.right(), 0);
        os << ')';
        return;
    }
}

}  // namespace

void free_vars(const Formula& f, std::vector<std::string>& out) { free_vars_rec(f, out, {}); }
void free_vars(const Constraint& c, std::vector<std::string>& out) { constraint_vars(c, out, {}); }

std::string to_string(const Constraint& c)
{
    std::ostringstream os;
    print_constraint(os, c);
    return os.str();
}

std::string to_string(const Formula& f)
{
    std::ostringstream os;
    if (!f)
        return "<null>";
    print_formula(os, f, 0);
    return os.str();
}

}  // namespace setsolve
