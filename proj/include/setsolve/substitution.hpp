#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "setsolve/term.hpp"

namespace setsolve {

/// Idempotent variable bindings. Every stored right-hand side is already
/// resolved against the other bindings, so one application is enough.
class Substitution {
public:
    Substitution() = default;

    [[nodiscard]] bool empty() const { return map_.empty(); }
    [[nodiscard]] std::size_t size() const { return map_.size(); }
    [[nodiscard]] const Term* find(const std::string& var) const;
    [[nodiscard]] bool binds(const std::string& var) const { return find(var) != nullptr; }

    /// Adds X -> t, resolving t first and propagating into existing bindings.
    /// Returns false (and leaves the substitution unchanged) when X occurs in
    /// the resolved t.
    bool bind(const std::string& var, const Term& t);

    [[nodiscard]] Term apply(const Term& t) const;

    [[nodiscard]] const std::map<std::string, Term>& bindings() const { return map_; }

    /// Restriction to the given variable names (order of the map).
    [[nodiscard]] Substitution restrict(const std::vector<std::string>& vars) const;

    friend bool operator==(const Substitution&, const Substitution&) = default;

private:
    std::map<std::string, Term> map_;
};

/// t[var := value], no resolution through other bindings.
Term replace_var(const Term& t, const std::string& var, const Term& value);

/// Simultaneous renaming/instantiation through a small map.
Term replace_vars(const Term& t, const std::map<std::string, Term>& m);

inline Term apply_subst(const Substitution& s, const Term& t) { return s.apply(t); }

}  // namespace setsolve
