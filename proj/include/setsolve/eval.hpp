#pragma once

#include <map>
#include <string>

#include "setsolve/formula.hpp"
#include "setsolve/parser.hpp"

namespace setsolve {

enum class Truth { False, True, Unknown };

using Env = std::map<std::string, Term>;

/// Direct set-theoretic evaluation of a formula whose free variables are all
/// bound in `env`. Quantifier locals and clause-body existentials are found
/// by enumerating the finite sets they are matched against; `Unknown` is
/// returned when a value cannot be determined that way.
Truth evaluate(const Formula& f, const Env& env, const Program* prog = nullptr);
Truth evaluate(const Constraint& c, const Env& env, const Program* prog = nullptr);

/// Ground set membership (handles unexpanded intervals).
bool ground_member(const Term& elem, const Term& set);

}  // namespace setsolve
