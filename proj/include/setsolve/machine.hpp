#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "setsolve/formula.hpp"
#include "setsolve/parser.hpp"
#include "setsolve/solver.hpp"
#include "setsolve/type_expr.hpp"
#include "setsolve/types.hpp"

namespace setsolve {

struct Labeled {
    std::string label;
    Formula formula;
    Span span;
};

/// `x := value` when `index` is empty, `x(index) := value` otherwise.
/// `target` is the logic variable name of the state variable.
struct Action {
    std::string label;
    std::string target;
    std::optional<Term> index;
    Term value;
    Span span;
};

/// Declared identifier: `source` as written, `var` the logic variable name.
struct Decl {
    std::string source;
    std::string var;
    std::optional<TypeExpr> type;
    Span span;
};

/// Constant of the context. For `set` constants `type` is the element type
/// and the carrier is the enumeration it resolves to, if any.
struct Constant {
    Decl decl;
    bool is_set = false;
};

struct Event {
    std::string name;
    std::vector<Decl> params;
    std::vector<Labeled> guards;
    std::vector<Action> actions;
    Span span;
};

struct PoAnnotation {
    bool closed_domain = false;
    std::vector<std::string> drop;
};

struct Machine {
    std::string name;
    std::string context;
    std::vector<std::pair<std::string, TypeExpr>> type_defs;
    std::vector<Constant> constants;
    std::vector<Decl> variables;
    std::vector<Labeled> invariants;
    std::vector<Action> init;
    std::vector<Event> events;
    std::map<std::string, PoAnnotation> annotations;

    [[nodiscard]] std::map<std::string, TypeExpr> type_map() const;
    [[nodiscard]] const Decl* variable(const std::string& var) const;
    [[nodiscard]] const Event* event(const std::string& name) const;
    /// Declared types of constants, state variables and their primed copies,
    /// resolved against the type synonyms.
    [[nodiscard]] std::map<std::string, TypeExpr> declared_types() const;
    /// Ground carrier of a set constant (its enumerated element type).
    [[nodiscard]] std::optional<Term> carrier(const Constant& c) const;
};

/// Logic variable name for a machine identifier: first letter upper-cased.
std::string machine_var(const std::string& ident);
/// Next-state copy of a state variable.
std::string primed(const std::string& var);

Machine parse_machine(std::string_view src);
/// Formula in machine syntax over logic variables: `F(X)` is an application.
Formula parse_machine_formula(std::string_view src);
Machine load_machine(const std::string& path);
std::string to_string(const Machine& m);

/// Replaces function applications and nested integer expressions by fresh
/// variables defined through applyTo/is. `f(x) = v` becomes applyTo(F,X,V).
Formula desugar_formula(const Formula& f, FreshGen& fresh);

/// Action as a formula over current and primed state. Initialisation actions
/// constrain the unprimed variable.
Formula desugar_action(const Action& a, bool initial, FreshGen& fresh);

/// Typechecks every invariant, guard and action of the machine.
std::vector<TypeError> typecheck_machine(const Machine& m);

}  // namespace setsolve
