#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "setsolve/term.hpp"

namespace setsolve {

using Rational = boost::multiprecision::cpp_rational;

/// sum(coef[x] * x) + constant
struct LinExpr {
    std::map<std::string, Rational> coef;
    Rational constant = 0;

    LinExpr& operator+=(const LinExpr& o);
    LinExpr& operator*=(const Rational& k);
    [[nodiscard]] bool is_constant() const { return coef.empty(); }
};

LinExpr operator-(LinExpr a, const LinExpr& b);

/// Linear form of an integer term; nullopt when the term is not an integer
/// expression or multiplies two non-constant factors.
std::optional<LinExpr> linearize(const Term& t);

/// Value of a ground integer expression.
std::optional<std::int64_t> eval_int(const Term& t);

enum class Rel : std::uint8_t { Le, Eq };

/// expr rel 0
struct LinConstraint {
    LinExpr expr;
    Rel rel = Rel::Le;
};

enum class ArithStatus { Sat, Unsat, Unknown };

struct ArithResult {
    ArithStatus status = ArithStatus::Unknown;
    std::map<std::string, std::int64_t> model;
};

struct ArithLimits {
    int branch_depth = 24;
    std::size_t max_constraints = 4000;
};

/// Integer feasibility by Fourier-Motzkin elimination over the rationals
/// followed by branch and bound on fractional back-substituted values.
/// Variables listed in `vars` but not constrained receive 0.
ArithResult solve_linear(const std::vector<LinConstraint>& cs, const std::vector<std::string>& vars,
                         const ArithLimits& limits = {});

/// a <= b, a < b and a = b as normalized integer constraints.
LinConstraint make_le(const LinExpr& a, const LinExpr& b);
LinConstraint make_lt(const LinExpr& a, const LinExpr& b);
LinConstraint make_eq(const LinExpr& a, const LinExpr& b);

}  // namespace setsolve
