#include "setsolve/arith.hpp"

#include <algorithm>
#include <limits>

namespace setsolve {

using boost::multiprecision::cpp_int;

LinExpr& LinExpr::operator+=(const LinExpr& o)
{
    for (const auto& [v, k] : o.coef) {
        Rational& c = coef[v];
        c += k;
        if (c == 0)
            coef.erase(v);
    }
    constant += o.constant;
    return *this;
}

LinExpr& LinExpr::operator*=(const Rational& k)
{
    if (k == 0) {
        coef.clear();
        constant = 0;
        return *this;
    }
    for (auto& kv : coef)
        kv.second *= k;
    constant *= k;
    return *this;
}

LinExpr operator-(LinExpr a, const LinExpr& b)
{
    LinExpr nb = b;
    nb *= Rational(-1);
    a += nb;
    return a;
}

std::optional<LinExpr> linearize(const Term& t)
{
    switch (t.kind()) {
    case TermKind::Int: {
        LinExpr e;
        e.constant = t.value();
        return e;
    }
    case TermKind::Var: {
        LinExpr e;
        e.coef[t.name()] = 1;
        return e;
    }
    case TermKind::Arith: {
        auto a = linearize(t.lhs());
        auto b = linearize(t.rhs());
        if (!a || !b)
            return std::nullopt;
        switch (t.op()) {
        case '+':
            *a += *b;
            return a;
        case '-':
            return *a - *b;
        case '*':
            if (a->is_constant()) {
                *b *= a->constant;
                return b;
            }
            if (b->is_constant()) {
                *a *= b->constant;
                return a;
            }
            return std::nullopt;
        default:
            return std::nullopt;
        }
    }
    default:
        return std::nullopt;
    }
}

std::optional<std::int64_t> eval_int(const Term& t)
{
    if (!t.is_ground())
        return std::nullopt;
    auto e = linearize(t);
    if (!e || !e->is_constant())
        return std::nullopt;
    const Rational& c = e->constant;
    if (denominator(c) != 1)
        return std::nullopt;
    cpp_int n = numerator(c);
    if (n > std::numeric_limits<std::int64_t>::max() || n < std::numeric_limits<std::int64_t>::min())
        return std::nullopt;
    return static_cast<std::int64_t>(n);
}

LinConstraint make_le(const LinExpr& a, const LinExpr& b) { return {a - b, Rel::Le}; }

LinConstraint make_lt(const LinExpr& a, const LinExpr& b)
{
    LinExpr e = a - b;
    e.constant += 1;
    return {e, Rel::Le};
}

LinConstraint make_eq(const LinExpr& a, const LinExpr& b) { return {a - b, Rel::Eq}; }

namespace {

cpp_int floor_of(const Rational& r)
{
    cpp_int n = numerator(r);
    cpp_int d = denominator(r);
    cpp_int q = n / d;
    if (n % d != 0 && n < 0)
        q -= 1;
    return q;
}

cpp_int ceil_of(const Rational& r) { return -floor_of(-r); }

// Replaces v by def in e.
void substitute(LinExpr& e, const std::string& v, const LinExpr& def)
{
    auto it = e.coef.find(v);
    if (it == e.coef.end())
        return;
    Rational k = it->second;
    e.coef.erase(it);
    LinExpr scaled = def;
    scaled *= k;
    e += scaled;
}

// Removes common positive factors so duplicate rows compare equal.
void normalize_row(LinExpr& e)
{
    if (e.coef.empty())
        return;
    Rational m = 0;
    for (const auto& kv : e.coef)
        m = std::max(m, kv.second < 0 ? Rational(-kv.second) : kv.second);
    if (m != 0 && m != 1)
        e *= Rational(1) / m;
}

bool same_row(const LinExpr& a, const LinExpr& b) { return a.coef == b.coef && a.constant == b.constant; }

enum class Fm { Sat, Unsat, Unknown };

struct FmResult {
    Fm status = Fm::Unknown;
    std::map<std::string, Rational> values;
};

FmResult fourier_motzkin(const std::vector<LinConstraint>& cs, const ArithLimits& limits)
{
    std::vector<LinExpr> eqs;
    std::vector<LinExpr> ineqs;
    for (const auto& c : cs)
        (c.rel == Rel::Eq ? eqs : ineqs).push_back(c.expr);

    std::vector<std::pair<std::string, LinExpr>> defs;
    for (std::size_t i = 0; i < eqs.size(); ++i) {
        LinExpr e = eqs[i];
        if (e.coef.empty()) {
            if (e.constant != 0)
                return {Fm::Unsat, {}};
            continue;
        }
        auto pick = e.coef.begin();
        for (auto it = e.coef.begin(); it != e.coef.end(); ++it)
            if (abs(it->second) == 1) {
                pick = it;
                break;
            }
        std::string v = pick->first;
        Rational a = pick->second;
        e.coef.erase(pick);
        e *= Rational(-1) / a;
        for (std::size_t j = i + 1; j < eqs.size(); ++j)
            substitute(eqs[j], v, e);
        for (auto& row : ineqs)
            substitute(row, v, e);
        defs.emplace_back(v, e);
    }

    std::vector<std::string> order;
    std::vector<std::vector<LinExpr>> bounds_at;
    std::vector<LinExpr> cur;
    auto add_row = [&](LinExpr row, std::vector<LinExpr>& into) -> bool {
        if (row.coef.empty())
            return row.constant <= 0;
        normalize_row(row);
        for (const auto& r : into)
            if (same_row(r, row))
                return true;
        into.push_back(std::move(row));
        return true;
    };
    for (auto& row : ineqs)
        if (!add_row(row, cur))
            return {Fm::Unsat, {}};

    while (true) {
        std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
        for (const auto& row : cur)
            for (const auto& [v, k] : row.coef)
                (k > 0 ? counts[v].first : counts[v].second)++;
        if (counts.empty())
            break;
        std::string best;
        long long best_cost = std::numeric_limits<long long>::max();
        for (const auto& [v, pn] : counts) {
            long long cost = static_cast<long long>(pn.first * pn.second) -
                             static_cast<long long>(pn.first + pn.second);
            if (cost < best_cost) {
                best_cost = cost;
                best = v;
            }
        }
        std::vector<LinExpr> pos;
        std::vector<LinExpr> neg;
        std::vector<LinExpr> next;
        for (auto& row : cur) {
            auto it = row.coef.find(best);
            if (it == row.coef.end())
                next.push_back(std::move(row));
            else
                (it->second > 0 ? pos : neg).push_back(std::move(row));
        }
        std::vector<LinExpr> touched = pos;
        touched.insert(touched.end(), neg.begin(), neg.end());
        for (const auto& p : pos) {
            for (const auto& n : neg) {
                Rational kp = p.coef.at(best);
                Rational kn = -n.coef.at(best);
                LinExpr a = p;
                a *= kn;
                LinExpr b = n;
                b *= kp;
                a += b;
                a.coef.erase(best);
                if (!add_row(std::move(a), next))
                    return {Fm::Unsat, {}};
                if (next.size() > limits.max_constraints)
                    return {Fm::Unknown, {}};
            }
        }
        order.push_back(best);
        bounds_at.push_back(std::move(touched));
        cur = std::move(next);
    }

    FmResult out;
    out.status = Fm::Sat;
    auto value_of = [&](const LinExpr& e, const std::string& skip) {
        Rational s = e.constant;
        for (const auto& [v, k] : e.coef)
            if (v != skip) {
                auto it = out.values.find(v);
                s += k * (it == out.values.end() ? Rational(0) : it->second);
            }
        return s;
    };
    for (std::size_t i = order.size(); i-- > 0;) {
        const std::string& v = order[i];
        std::optional<Rational> lo;
        std::optional<Rational> hi;
        for (const auto& row : bounds_at[i]) {
            Rational a = row.coef.at(v);
            Rational bound = -value_of(row, v) / a;
            if (a > 0)
                hi = hi ? std::min(*hi, bound) : bound;
            else
                lo = lo ? std::max(*lo, bound) : bound;
        }
        Rational choice = 0;
        if (lo && hi && *lo > *hi)
            return {Fm::Unsat, {}};
        cpp_int ilo = lo ? ceil_of(*lo) : cpp_int(std::numeric_limits<std::int64_t>::min());
        cpp_int ihi = hi ? floor_of(*hi) : cpp_int(std::numeric_limits<std::int64_t>::max());
        if (ilo <= ihi)
            choice = Rational(std::clamp(cpp_int(0), ilo, ihi));
        else
            choice = *lo;
        out.values[v] = choice;
    }
    for (std::size_t i = defs.size(); i-- > 0;)
        out.values[defs[i].first] = value_of(defs[i].second, {});
    return out;
}

ArithResult solve_rec(std::vector<LinConstraint>& cs, const std::vector<std::string>& vars,
                      const ArithLimits& limits, int depth)
{
    FmResult fm = fourier_motzkin(cs, limits);
    if (fm.status == Fm::Unsat)
        return {ArithStatus::Unsat, {}};
    if (fm.status == Fm::Unknown)
        return {ArithStatus::Unknown, {}};
    for (const auto& [v, val] : fm.values) {
        if (denominator(val) == 1)
            continue;
        if (depth <= 0)
            return {ArithStatus::Unknown, {}};
        LinExpr x;
        x.coef[v] = 1;
        LinExpr f;
        f.constant = Rational(floor_of(val));
        bool unknown = false;
        for (int side = 0; side < 2; ++side) {
            cs.push_back(side == 0 ? make_le(x, f) : make_le([&] {
                LinExpr c;
                c.constant = f.constant + 1;
                return c;
            }(), x));
            ArithResult r = solve_rec(cs, vars, limits, depth - 1);
            cs.pop_back();
            if (r.status == ArithStatus::Sat)
                return r;
            if (r.status == ArithStatus::Unknown)
                unknown = true;
        }
        return {unknown ? ArithStatus::Unknown : ArithStatus::Unsat, {}};
    }
    ArithResult out;
    out.status = ArithStatus::Sat;
    auto to_i64 = [](const Rational& r, std::int64_t& dst) {
        cpp_int n = numerator(r);
        if (n > std::numeric_limits<std::int64_t>::max() || n < std::numeric_limits<std::int64_t>::min())
            return false;
        dst = static_cast<std::int64_t>(n);
        return true;
    };
    for (const auto& [v, val] : fm.values) {
        std::int64_t x = 0;
        if (!to_i64(val, x))
            return {ArithStatus::Unknown, {}};
        out.model[v] = x;
    }
    for (const auto& v : vars)
        out.model.emplace(v, 0);
    return out;
}

}  // namespace

ArithResult solve_linear(const std::vector<LinConstraint>& cs, const std::vector<std::string>& vars,
                         const ArithLimits& limits)
{
    std::vector<LinConstraint> work = cs;
    return solve_rec(work, vars, limits, limits.branch_depth);
}

}  // namespace setsolve
