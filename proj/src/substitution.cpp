#include "setsolve/substitution.hpp"

namespace setsolve {

namespace {

Term rebuild(const Term& t, const Term& a, const Term& b)
{
    if (a == t.lhs() && b == t.rhs())
        return t;
    switch (t.kind()) {
    case TermKind::Pair:
        return Term::pair(a, b);
    case TermKind::ExtSet:
        return Term::ext(a, b);
    case TermKind::CP:
        return Term::cp(a, b);
    case TermKind::Interval:
        return Term::interval(a, b);
    case TermKind::Arith:
        return Term::arith(t.op(), a, b);
    case TermKind::Apply:
        return Term::apply(a, b);
    default:
        return t;
    }
}

template <class Lookup>
Term map_vars(const Term& t, std::uint64_t mask, const Lookup& lookup)
{
    if (!t || t.is_ground() || (t.var_mask() & mask) == 0)
        return t;
    if (t.is_var()) {
        if (const Term* v = lookup(t.name()))
            return *v;
        return t;
    }
    return rebuild(t, map_vars(t.lhs(), mask, lookup), map_vars(t.rhs(), mask, lookup));
}

}  // namespace

const Term* Substitution::find(const std::string& var) const
{
    auto it = map_.find(var);
    return it == map_.end() ? nullptr : &it->second;
}

Term Substitution::apply(const Term& t) const
{
    if (map_.empty())
        return t;
    std::uint64_t mask = 0;
    for (const auto& kv : map_)
        mask |= var_bit(kv.first);
    return map_vars(t, mask, [this](const std::string& n) { return find(n); });
}

bool Substitution::bind(const std::string& var, const Term& t)
{
    Term value = apply(t);
    if (value.contains_var(var))
        return false;
    for (auto& kv : map_)
        kv.second = replace_var(kv.second, var, value);
    map_[var] = value;
    return true;
}

Substitution Substitution::restrict(const std::vector<std::string>& vars) const
{
    Substitution out;
    for (const auto& v : vars)
        if (const Term* t = find(v))
            out.map_[v] = *t;
    return out;
}

Term replace_var(const Term& t, const std::string& var, const Term& value)
{
    return map_vars(t, var_bit(var), [&](const std::string& n) -> const Term* {
        return n == var ? &value : nullptr;
    });
}

Term replace_vars(const Term& t, const std::map<std::string, Term>& m)
{
    if (m.empty())
        return t;
    std::uint64_t mask = 0;
    for (const auto& kv : m)
        mask |= var_bit(kv.first);
    return map_vars(t, mask, [&](const std::string& n) -> const Term* {
        auto it = m.find(n);
        return it == m.end() ? nullptr : &it->second;
    });
}

}  // namespace setsolve
