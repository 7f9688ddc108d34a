#include "setsolve/types.hpp"

#include <algorithm>
#include <tuple>

namespace setsolve {

namespace {

class Checker {
public:
    Checker(const Program* prog, const std::map<std::string, TypeExpr>& defs) : prog_(prog), defs_(defs) {}

    std::vector<TypeError> errors;
    std::map<std::string, TypeExpr> vars;

    TypeExpr fresh() { return TypeExpr::var("t" + std::to_string(counter_++)); }

    TypeExpr prune(const TypeExpr& t) const
    {
        if (t.kind == TypeKind::Var) {
            auto it = subst_.find(t.name);
            return it == subst_.end() ? t : prune(it->second);
        }
        TypeExpr out = t;
        for (auto& a : out.args)
            a = prune(a);
        return out;
    }

    bool unify(const TypeExpr& x, const TypeExpr& y)
    {
        TypeExpr a = walk(x);
        TypeExpr b = walk(y);
        if (a.kind == TypeKind::Var && b.kind == TypeKind::Var && a.name == b.name)
            return true;
        if (a.kind == TypeKind::Var)
            return bind(a.name, b);
        if (b.kind == TypeKind::Var)
            return bind(b.name, a);
        if (a.kind != b.kind)
            return false;
        switch (a.kind) {
        case TypeKind::Int:
        case TypeKind::Str:
            return true;
        case TypeKind::Basic:
        case TypeKind::Named:
            return a.name == b.name;
        case TypeKind::Enum: {
            auto ma = a.members;
            auto mb = b.members;
            std::sort(ma.begin(), ma.end());
            std::sort(mb.begin(), mb.end());
            return ma == mb;
        }
        case TypeKind::Product:
        case TypeKind::SetOf:
            if (a.args.size() != b.args.size())
                return false;
            for (std::size_t i = 0; i < a.args.size(); ++i)
                if (!unify(a.args[i], b.args[i]))
                    return false;
            return true;
        default:
            return false;
        }
    }

    TypeExpr declared(const TypeExpr& t, Span s)
    {
        TypeExpr r = resolve_type(t, defs_);
        check_basic(r, s);
        return r;
    }

    TypeExpr var_type(const std::string& v)
    {
        auto it = vars.find(v);
        if (it != vars.end())
            return it->second;
        TypeExpr t = fresh();
        vars.emplace(v, t);
        return t;
    }

    TypeExpr term(const Term& t, Span s)
    {
        switch (t.kind()) {
        case TermKind::Var:
            return var_type(t.name());
        case TermKind::Atom: {
            TypeExpr v = fresh();
            atoms_.emplace_back(t.name(), v, s);
            return v;
        }
        case TermKind::Int:
            return TypeExpr::integer();
        case TermKind::Str:
            return TypeExpr::string();
        case TermKind::Pair:
            return TypeExpr::product({term(t.lhs(), s), term(t.rhs(), s)});
        case TermKind::Empty:
            return TypeExpr::set_of(fresh());
        case TermKind::ExtSet: {
            TypeExpr e = term(t.head(), s);
            TypeExpr set = TypeExpr::set_of(e);
            expect(term(t.tail(), s), set, t, s);
            return set;
        }
        case TermKind::CP: {
            TypeExpr a = fresh();
            TypeExpr b = fresh();
            expect(term(t.lhs(), s), TypeExpr::set_of(a), t.lhs(), s);
            expect(term(t.rhs(), s), TypeExpr::set_of(b), t.rhs(), s);
            return TypeExpr::set_of(TypeExpr::product({a, b}));
        }
        case TermKind::Interval:
        case TermKind::Arith: {
            expect(term(t.lhs(), s), TypeExpr::integer(), t.lhs(), s);
            expect(term(t.rhs(), s), TypeExpr::integer(), t.rhs(), s);
            return t.is(TermKind::Arith) ? TypeExpr::integer() : TypeExpr::set_of(TypeExpr::integer());
        }
        case TermKind::Apply: {
            TypeExpr a = term(t.rhs(), s);
            TypeExpr r = fresh();
            expect(term(t.lhs(), s), TypeExpr::set_of(TypeExpr::product({a, r})), t.lhs(), s);
            return r;
        }
        }
        return fresh();
    }

    void formula(const Formula& f)
    {
        if (!f)
            return;
        switch (f.kind()) {
        case FKind::True:
        case FKind::False:
            return;
        case FKind::Atom:
            constraint(f.constraint(), f.span());
            return;
        case FKind::Call:
            call(f);
            return;
        default:
            formula(f.left());
            formula(f.right());
            return;
        }
    }

    void finish()
    {
        // An atom of otherwise unknown type belongs to the enumeration that
        // lists it, when exactly one does.
        for (const auto& [name, ty, span] : atoms_) {
            if (prune(ty).kind != TypeKind::Var)
                continue;
            std::vector<TypeExpr> owners;
            for (const auto& kv : defs_) {
                TypeExpr r = resolve_type(kv.second, defs_);
                if (r.kind == TypeKind::Enum &&
                    std::find(r.members.begin(), r.members.end(), name) != r.members.end() &&
                    std::find(owners.begin(), owners.end(), r) == owners.end())
                    owners.push_back(r);
            }
            if (owners.size() == 1)
                unify(ty, owners.front());
        }
        for (const auto& [name, ty, span] : atoms_) {
            TypeExpr t = prune(ty);
            if (t.kind == TypeKind::Var)
                continue;
            if (t.kind == TypeKind::Enum) {
                if (std::find(t.members.begin(), t.members.end(), name) == t.members.end())
                    error("constant '" + name + "' is not a member of " + to_string(t), span);
                continue;
            }
            error("constant '" + name + "' used where " + to_string(t) + " is expected", span);
        }
        for (auto& kv : vars)
            kv.second = prune(kv.second);
    }

    void error(std::string msg, Span s) { errors.push_back({std::move(msg), s}); }

private:
    const Program* prog_;
    const std::map<std::string, TypeExpr>& defs_;
    std::map<std::string, TypeExpr> subst_;
    std::vector<std::tuple<std::string, TypeExpr, Span>> atoms_;
    int counter_ = 0;

    TypeExpr walk(const TypeExpr& t) const
    {
        if (t.kind != TypeKind::Var)
            return t;
        auto it = subst_.find(t.name);
        return it == subst_.end() ? t : walk(it->second);
    }

    bool occurs(const std::string& v, const TypeExpr& t) const
    {
        TypeExpr w = walk(t);
        if (w.kind == TypeKind::Var)
            return w.name == v;
        return std::any_of(w.args.begin(), w.args.end(), [&](const TypeExpr& a) { return occurs(v, a); });
    }

    bool bind(const std::string& v, const TypeExpr& t)
    {
        if (occurs(v, t))
            return false;
        subst_[v] = t;
        return true;
    }

    void check_basic(const TypeExpr& t, Span s)
    {
        if (t.kind == TypeKind::Basic)
            error("basic type '" + t.name + "' is not supported; define it as an enumeration with def_type", s);
        for (const auto& a : t.args)
            check_basic(a, s);
    }

    void expect(const TypeExpr& got, const TypeExpr& want, const Term& what, Span s)
    {
        if (!unify(got, want))
            error("type mismatch for " + to_string(what) + ": " + to_string(prune(got)) + " vs " +
                      to_string(prune(want)),
                  s);
    }

    void same(const std::vector<TypeExpr>& ts, const Constraint& c, Span s)
    {
        for (std::size_t i = 1; i < ts.size(); ++i)
            if (!unify(ts[0], ts[i])) {
                error("ill-typed constraint " + to_string(c) + ": " + to_string(prune(ts[0])) + " vs " +
                          to_string(prune(ts[i])),
                      s);
                return;
            }
    }

    void sig(const Constraint& c, Span s, const std::vector<TypeExpr>& want)
    {
        for (std::size_t i = 0; i < want.size() && i < c.args.size(); ++i) {
            TypeExpr got = term(c.args[i], s);
            if (!unify(got, want[i])) {
                error("ill-typed argument " + std::to_string(i + 1) + " of " + to_string(c) + ": " +
                          to_string(prune(got)) + " vs " + to_string(prune(want[i])),
                      s);
                return;
            }
        }
    }

    static TypeExpr set(TypeExpr t) { return TypeExpr::set_of(std::move(t)); }
    static TypeExpr rel(TypeExpr a, TypeExpr b) { return set(TypeExpr::product({std::move(a), std::move(b)})); }

    void constraint(const Constraint& c, Span s)
    {
        TypeExpr a = fresh(), b = fresh(), g = fresh();
        switch (c.kind) {
        case CKind::Eq:
        case CKind::Neq:
            same({term(c.args[0], s), term(c.args[1], s)}, c, s);
            return;
        case CKind::In:
        case CKind::Nin:
            sig(c, s, {a, set(a)});
            return;
        case CKind::Un:
        case CKind::Nun:
            sig(c, s, {set(a), set(a), set(a)});
            return;
        case CKind::Disj:
        case CKind::Ndisj:
        case CKind::Subset:
        case CKind::Nsubset:
            sig(c, s, {set(a), set(a)});
            return;
        case CKind::Comp:
        case CKind::Ncomp:
            sig(c, s, {rel(a, b), rel(b, g), rel(a, g)});
            return;
        case CKind::Inv:
        case CKind::Ninv:
            sig(c, s, {rel(a, b), rel(b, a)});
            return;
        case CKind::Id:
        case CKind::Nid:
            sig(c, s, {set(a), rel(a, a)});
            return;
        case CKind::Pfun:
        case CKind::Npfun:
            sig(c, s, {rel(a, b)});
            return;
        case CKind::Dom:
        case CKind::Ndom:
            sig(c, s, {rel(a, b), set(a)});
            return;
        case CKind::Ran:
        case CKind::Nran:
            sig(c, s, {rel(a, b), set(b)});
            return;
        case CKind::ApplyTo:
            sig(c, s, {rel(a, b), a, b});
            return;
        case CKind::Foplus:
            sig(c, s, {rel(a, b), a, b, rel(a, b)});
            return;
        case CKind::Le:
        case CKind::Lt:
        case CKind::Is:
            sig(c, s, {TypeExpr::integer(), TypeExpr::integer()});
            return;
        case CKind::Foreach:
        case CKind::Exists: {
            const Quant& q = *c.q;
            TypeExpr ct = term(q.ctrl, s);
            TypeExpr dt = term(q.domain, s);
            if (!unify(dt, set(ct)))
                error("quantifier domain " + to_string(q.domain) + " has type " + to_string(prune(dt)) +
                          ", expected a set of " + to_string(prune(ct)),
                      s);
            formula(q.func);
            formula(q.body);
            return;
        }
        }
    }

    void call(const Formula& f)
    {
        Span s = f.span();
        if (f.name() == kDecPredicate) {
            TypeExpr want;
            try {
                want = declared(parse_type(f.args()[1].name()), s);
            } catch (const ParseError& e) {
                error(std::string("bad type in dec: ") + e.what(), s);
                return;
            }
            TypeExpr got = term(f.args()[0], s);
            if (!unify(got, want))
                error("declared type " + to_string(want) + " conflicts with " + to_string(prune(got)) + " for " +
                          to_string(f.args()[0]),
                      s);
            return;
        }
        std::vector<TypeExpr> arg_types;
        for (const Term& t : f.args())
            arg_types.push_back(term(t, s));
        if (!prog_)
            return;
        auto it = prog_->pred_types.find(f.name());
        if (it == prog_->pred_types.end())
            return;
        if (it->second.size() != arg_types.size()) {
            error("predicate " + f.name() + " declared with " + std::to_string(it->second.size()) + " arguments", s);
            return;
        }
        for (std::size_t i = 0; i < arg_types.size(); ++i) {
            TypeExpr want = declared(it->second[i], s);
            if (!unify(arg_types[i], want))
                error("argument " + std::to_string(i + 1) + " of " + f.name() + " has type " +
                          to_string(prune(arg_types[i])) + ", expected " + to_string(want),
                      s);
        }
    }
};

}  // namespace

TypeExpr resolve_type(const TypeExpr& t, const std::map<std::string, TypeExpr>& defs)
{
    switch (t.kind) {
    case TypeKind::Named: {
        auto it = defs.find(t.name);
        if (it == defs.end())
            return TypeExpr::basic(t.name);
        return resolve_type(it->second, defs);
    }
    case TypeKind::Product: {
        std::vector<TypeExpr> comps;
        for (const auto& a : t.args)
            comps.push_back(resolve_type(a, defs));
        TypeExpr out = comps.back();
        for (std::size_t i = comps.size() - 1; i-- > 0;)
            out = TypeExpr::product({comps[i], out});
        return out;
    }
    case TypeKind::SetOf:
        return TypeExpr::set_of(resolve_type(t.args[0], defs));
    default:
        return t;
    }
}

std::vector<Term> enum_members(const TypeExpr& t)
{
    std::vector<Term> out;
    if (t.kind == TypeKind::Enum)
        for (const auto& m : t.members)
            out.push_back(Term::atom(m));
    return out;
}

std::optional<Term> carrier(const TypeExpr& t)
{
    if (t.kind == TypeKind::Enum)
        return canonical(Term::set_of(enum_members(t)));
    if (t.kind == TypeKind::Product && t.args.size() == 2) {
        auto a = carrier(t.args[0]);
        auto b = carrier(t.args[1]);
        if (a && b)
            return canonical(Term::cp(*a, *b));
    }
    return std::nullopt;
}

void add_type_domains(SolveOptions& so, const std::map<std::string, TypeExpr>& types)
{
    for (const auto& [v, t] : types) {
        if (t.kind == TypeKind::SetOf) {
            if (auto c = carrier(t.args[0]))
                so.set_domains[v] = *c;
        } else if (auto c = carrier(t)) {
            std::vector<Term> members;
            ground_members(*c, members);
            so.enum_domains[v] = members;
        }
    }
}

TypeCheckResult typecheck_formula(const Formula& f, const Program* prog, const std::map<std::string, TypeExpr>& declared)
{
    static const std::map<std::string, TypeExpr> kNoDefs;
    Checker ck(prog, prog ? prog->type_defs : kNoDefs);
    for (const auto& [v, t] : declared)
        ck.vars[v] = ck.declared(t, {});
    ck.formula(f);
    ck.finish();
    TypeCheckResult r;
    r.errors = std::move(ck.errors);
    std::vector<std::string> fv;
    free_vars(f, fv);
    for (const auto& v : fv)
        if (ck.vars.count(v))
            r.var_types[v] = ck.vars.at(v);
    return r;
}

TypeCheckResult typecheck_program(const Program& prog)
{
    TypeCheckResult r;
    for (const auto& [name, types] : prog.pred_types) {
        if (prog.clauses_of(name, types.size()).empty())
            r.errors.push_back({"dec_p_type for undefined predicate " + name + "/" + std::to_string(types.size()), {}});
    }
    for (const Clause& cl : prog.clauses) {
        Checker ck(&prog, prog.type_defs);
        auto it = prog.pred_types.find(cl.name);
        if (it != prog.pred_types.end()) {
            if (it->second.size() != cl.params.size()) {
                r.errors.push_back({"clause " + cl.name + " does not match its dec_p_type arity", cl.span});
                continue;
            }
            for (std::size_t i = 0; i < cl.params.size(); ++i) {
                TypeExpr want = ck.declared(it->second[i], cl.span);
                if (!ck.unify(ck.term(cl.params[i], cl.span), want))
                    ck.error("parameter " + to_string(cl.params[i]) + " of " + cl.name + " is not of type " +
                                 to_string(want),
                             cl.span);
            }
        }
        ck.formula(cl.body);
        ck.finish();
        r.errors.insert(r.errors.end(), ck.errors.begin(), ck.errors.end());
    }
    for (const Query& q : prog.queries) {
        TypeCheckResult qr = typecheck_formula(q.formula, &prog);
        r.errors.insert(r.errors.end(), qr.errors.begin(), qr.errors.end());
    }
    return r;
}

}  // namespace setsolve
