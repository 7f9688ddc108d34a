#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "setsolve/formula.hpp"
#include "setsolve/parser.hpp"
#include "setsolve/substitution.hpp"

namespace setsolve {

enum class SolveStatus { Sat, Unsat, Unknown };

const char* status_name(SolveStatus s);

struct SolveOptions {
    const Program* program = nullptr;
    std::size_t max_steps = 2'000'000;
    double timeout_s = 0;  // 0: no wall-clock limit
    /// Decide constraints with ground arguments by direct evaluation instead
    /// of rewriting. Both paths must agree; tests switch this off.
    bool ground_shortcut = true;
    /// Finite domains for variables of enumerated type (typed mode).
    std::map<std::string, std::vector<Term>> enum_domains;
    /// Ground carriers for set variables of typed mode: X is a subset of it.
    std::map<std::string, Term> set_domains;
    int arith_branch_depth = 24;
};

struct Solution {
    /// Ground values for the free variables of the input formula.
    Substitution bindings;
    /// Irreducible constraints left before the model was chosen.
    std::vector<Constraint> residual;
};

struct SolveResult {
    SolveStatus status = SolveStatus::Unknown;
    std::vector<Solution> solutions;
    std::string reason;
    std::size_t steps = 0;
};

class NotNegatable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fresh variable names `_<prefix><n>`, unique within one generator.
class FreshGen {
public:
    explicit FreshGen(std::string prefix = "N") : prefix_(std::move(prefix)) {}
    Term var() { return Term::var(name()); }
    std::string name() { return "_" + prefix_ + std::to_string(next_++); }

private:
    std::string prefix_;
    std::size_t next_ = 0;
};

/// Logical negation. Functional quantifier parts and `let` definitions are
/// kept, only the body is negated. Throws NotNegatable for foplus, for
/// quantifiers with purely existential locals and for calls whose bodies
/// introduce existential variables.
Formula negate(const Formula& f, const Program* prog = nullptr);
Formula negate(const Formula& f, const Program* prog, FreshGen& fresh);

/// Renames every quantifier-bound variable to a fresh name.
Formula rename_bound(const Formula& f, FreshGen& fresh);

class SolverEngine;

/// Lazily enumerates solutions of a formula.
class SolutionStream {
public:
    SolutionStream(const Formula& f, SolveOptions opts);
    ~SolutionStream();
    SolutionStream(SolutionStream&&) noexcept;
    SolutionStream& operator=(SolutionStream&&) noexcept;

    std::optional<Solution> next();
    /// After next() returned nullopt: Unsat if the search space was
    /// exhausted without any inconclusive branch, Unknown otherwise.
    [[nodiscard]] SolveStatus exhausted_status() const;
    [[nodiscard]] const std::string& reason() const;
    [[nodiscard]] std::size_t steps() const;

private:
    std::unique_ptr<SolverEngine> engine_;
};

SolveResult solve(const Formula& f, const SolveOptions& opts = {}, std::size_t max_solutions = 1);

/// Result of a validity check: Proved when the negation is unsatisfiable.
enum class ProofStatus { Proved, Disproved, Unknown };

const char* proof_name(ProofStatus s);

struct ProofResult {
    ProofStatus status = ProofStatus::Unknown;
    std::optional<Solution> counterexample;
    std::string reason;
    std::size_t steps = 0;
};

ProofResult prove(const Formula& f, const SolveOptions& opts = {});

}  // namespace setsolve
