#include <algorithm>

#include "setsolve/solver.hpp"

namespace setsolve {

namespace {

constexpr int kMaxInline = 64;

CKind dual(CKind k)
{
    switch (k) {
    case CKind::Eq: return CKind::Neq;
    case CKind::Neq: return CKind::Eq;
    case CKind::In: return CKind::Nin;
    case CKind::Nin: return CKind::In;
    case CKind::Un: return CKind::Nun;
    case CKind::Nun: return CKind::Un;
    case CKind::Disj: return CKind::Ndisj;
    case CKind::Ndisj: return CKind::Disj;
    case CKind::Subset: return CKind::Nsubset;
    case CKind::Nsubset: return CKind::Subset;
    case CKind::Comp: return CKind::Ncomp;
    case CKind::Ncomp: return CKind::Comp;
    case CKind::Inv: return CKind::Ninv;
    case CKind::Ninv: return CKind::Inv;
    case CKind::Id: return CKind::Nid;
    case CKind::Nid: return CKind::Id;
    case CKind::Pfun: return CKind::Npfun;
    case CKind::Npfun: return CKind::Pfun;
    case CKind::Dom: return CKind::Ndom;
    case CKind::Ndom: return CKind::Dom;
    case CKind::Ran: return CKind::Nran;
    case CKind::Nran: return CKind::Ran;
    default: return k;
    }
}

class Negator {
public:
    Negator(const Program* prog, FreshGen& fresh) : prog_(prog), fresh_(fresh) {}

    Formula neg(const Formula& f, std::vector<std::string>& locals)
    {
        switch (f.kind()) {
        case FKind::True:
            return Formula::falsity();
        case FKind::False:
            return Formula::truth();
        case FKind::And:
            return Formula::disj(neg(f.left(), locals), neg(f.right(), locals));
        case FKind::Or:
            return Formula::conj(neg(f.left(), locals), neg(f.right(), locals));
        case FKind::Neg:
            return f.left();
        case FKind::Implies:
            return Formula::conj(f.left(), neg(f.right(), locals));
        case FKind::Atom:
            return atom(f.constraint(), locals, f.span());
        case FKind::Call:
            return call(f, locals);
        case FKind::Let: {
            std::vector<std::string> inner;
            Formula body = neg(f.right(), inner);
            std::vector<std::string> vars = f.vars();
            vars.insert(vars.end(), inner.begin(), inner.end());
            return Formula::let(std::move(vars), f.left(), body);
        }
        }
        return f;
    }

private:
    const Program* prog_;
    FreshGen& fresh_;
    int depth_ = 0;

    Formula atom(const Constraint& c, std::vector<std::string>& locals, Span s)
    {
        switch (c.kind) {
        case CKind::Foreach:
        case CKind::Exists: {
            const Quant& q = *c.q;
            if (!q.locals.empty() && q.func.is(FKind::True))
                throw NotNegatable("quantifier with existential locals: " + to_string(c));
            std::vector<std::string> inner;
            Formula body = neg(q.body, inner);
            std::vector<std::string> ls = q.locals;
            ls.insert(ls.end(), inner.begin(), inner.end());
            CKind k = c.kind == CKind::Foreach ? CKind::Exists : CKind::Foreach;
            return Formula::atom(make_quant(k, q.ctrl, q.domain, std::move(ls), body, q.func), s);
        }
        case CKind::Le:
            return Formula::atom(CKind::Lt, {c.args[1], c.args[0]}, s);
        case CKind::Lt:
            return Formula::atom(CKind::Le, {c.args[1], c.args[0]}, s);
        case CKind::Is: {
            Term t = fresh_.var();
            locals.push_back(t.name());
            return Formula::conj(Formula::atom(CKind::Is, {t, c.args[1]}, s),
                                 Formula::atom(CKind::Neq, {c.args[0], t}, s));
        }
        case CKind::ApplyTo: {
            const Term& x = c.args[1];
            return Formula::atom(CKind::Ncomp,
                                 {Term::set_of({Term::pair(x, x)}), c.args[0],
                                  Term::set_of({Term::pair(x, c.args[2])})},
                                 s);
        }
        case CKind::Foplus:
            throw NotNegatable("foplus cannot be negated");
        default:
            return Formula::atom(Constraint{dual(c.kind), c.args, nullptr}, s);
        }
    }

    Formula call(const Formula& f, std::vector<std::string>& locals)
    {
        if (f.name() == kDecPredicate)
            return f;
        if (!prog_)
            throw NotNegatable("unknown predicate " + f.name());
        auto clauses = prog_->clauses_of(f.name(), f.args().size());
        if (clauses.empty())
            throw NotNegatable("unknown predicate " + f.name());
        if (depth_ >= kMaxInline)
            throw NotNegatable("recursive predicate " + f.name());
        std::vector<Formula> parts;
        for (const Clause* cl : clauses) {
            std::map<std::string, Term> m;
            for (std::size_t i = 0; i < cl->params.size(); ++i) {
                const Term& p = cl->params[i];
                if (!p.is_var() || m.count(p.name()))
                    throw NotNegatable("clause head of " + f.name() + " is not linear in variables");
                m.emplace(p.name(), f.args()[i]);
            }
            std::vector<std::string> body_vars;
            free_vars(cl->body, body_vars);
            for (const auto& v : body_vars)
                if (!m.count(v))
                    throw NotNegatable("predicate " + f.name() + " has existential variable " + v);
            ++depth_;
            Formula body = rename_bound(replace_vars(cl->body, m), fresh_);
            parts.push_back(neg(body, locals));
            --depth_;
        }
        return Formula::conj(parts);
    }
};

Formula rename_rec(const Formula& f, FreshGen& fresh);

Constraint rename_quant(const Constraint& c, FreshGen& fresh)
{
    const Quant& q = *c.q;
    std::map<std::string, Term> m;
    for (const auto& v : bound_vars(q))
        m.emplace(v, Term::var(fresh.name() + "_" + (v.rfind('_', 0) == 0 ? std::string("B") : v)));
    std::vector<std::string> locals;
    for (const auto& l : q.locals)
        locals.push_back(m.at(l).name());
    return make_quant(c.kind, replace_vars(q.ctrl, m), q.domain, std::move(locals),
                      rename_rec(replace_vars(q.body, m), fresh), rename_rec(replace_vars(q.func, m), fresh));
}

Formula rename_rec(const Formula& f, FreshGen& fresh)
{
    switch (f.kind()) {
    case FKind::Atom:
        if (f.constraint().q)
            return Formula::atom(rename_quant(f.constraint(), fresh), f.span());
        return f;
    case FKind::And:
        return Formula::conj(rename_rec(f.left(), fresh), rename_rec(f.right(), fresh));
    case FKind::Or:
        return Formula::disj(rename_rec(f.left(), fresh), rename_rec(f.right(), fresh));
    case FKind::Neg:
        return Formula::neg(rename_rec(f.left(), fresh), f.span());
    case FKind::Implies:
        return Formula::implies(rename_rec(f.left(), fresh), rename_rec(f.right(), fresh), f.span());
    case FKind::Let: {
        std::map<std::string, Term> m;
        std::vector<std::string> vars;
        for (const auto& v : f.vars()) {
            Term t = Term::var(fresh.name());
            m.emplace(v, t);
            vars.push_back(t.name());
        }
        return Formula::let(std::move(vars), rename_rec(replace_vars(f.left(), m), fresh),
                            rename_rec(replace_vars(f.right(), m), fresh));
    }
    default:
        return f;
    }
}

}  // namespace

Formula rename_bound(const Formula& f, FreshGen& fresh) { return rename_rec(f, fresh); }

Formula negate(const Formula& f, const Program* prog, FreshGen& fresh)
{
    Negator n(prog, fresh);
    std::vector<std::string> locals;
    return n.neg(f, locals);
}

Formula negate(const Formula& f, const Program* prog)
{
    FreshGen fresh("T");
    return negate(f, prog, fresh);
}

}  // namespace setsolve
