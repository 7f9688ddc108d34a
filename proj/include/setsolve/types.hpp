#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "setsolve/formula.hpp"
#include "setsolve/parser.hpp"
#include "setsolve/solver.hpp"
#include "setsolve/type_expr.hpp"

namespace setsolve {

struct TypeError {
    std::string message;
    Span span;
};

struct TypeCheckResult {
    std::vector<TypeError> errors;
    /// Inferred types of the free variables (after resolution).
    std::map<std::string, TypeExpr> var_types;

    [[nodiscard]] bool ok() const { return errors.empty(); }
};

/// Expands synonyms from `defs`, flattens products to nested pairs.
/// Unknown names become Basic types.
TypeExpr resolve_type(const TypeExpr& t, const std::map<std::string, TypeExpr>& defs);

/// Checks one formula. `declared` fixes types of some free variables.
TypeCheckResult typecheck_formula(const Formula& f, const Program* prog,
                                  const std::map<std::string, TypeExpr>& declared = {});

/// Checks every clause against its dec_p_type declaration and every query.
TypeCheckResult typecheck_program(const Program& prog);

/// Members of an enumerated type as atoms; empty for other types.
std::vector<Term> enum_members(const TypeExpr& t);

/// Ground set of all values of a finite type (enumerations and pairs of
/// them); nullopt for int, str and set types.
std::optional<Term> carrier(const TypeExpr& t);

/// Restricts variables of finite type to their carriers in `so`.
void add_type_domains(SolveOptions& so, const std::map<std::string, TypeExpr>& types);

}  // namespace setsolve
