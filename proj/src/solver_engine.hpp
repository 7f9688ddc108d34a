#pragma once

#include <array>
#include <chrono>
#include <set>

#include "setsolve/solver.hpp"

namespace setsolve {

namespace detail {

constexpr std::size_t kLevels = 5;

struct State {
    Substitution subst;
    std::array<std::vector<Formula>, kLevels> goals;
    std::vector<Constraint> store;
    /// Set once a model choice (arithmetic witness, default values) was made;
    /// failures after that point do not prove unsatisfiability.
    bool committed = false;
    /// Typed set domains were added to the goals.
    bool domains_added = false;
};

enum class Sort { Unknown, Set, Int };

}  // namespace detail

class SolverEngine {
public:
    SolverEngine(const Formula& f, SolveOptions opts);

    std::optional<Solution> next();

    SolveStatus exhausted_status() const;
    const std::string& reason() const { return reason_; }
    std::size_t steps() const { return steps_; }

private:
    using State = detail::State;

    // Driver
    enum class Run { Fail, Solution, Abort };
    Run run(State& s, Solution& out);
    bool step_goal(State& s, const Formula& g);
    bool budget_exceeded();
    void push(State& s, const Formula& f);
    void push(State& s, CKind k, std::vector<Term> args);
    void branch(State& s, const std::vector<Formula>& alts);
    bool bind(State& s, const std::string& var, const Term& t);
    void store(State& s, Constraint c);
    void inconclusive(const std::string& why);

    // Rules
    bool handle(State& s, Constraint c);
    bool unify(State& s, const Term& a, const Term& b);
    bool bind_var(State& s, const Term& x, const Term& t);
    bool set_unify(State& s, const Term& a, const Term& b);
    bool rule_in(State& s, const Term& t, const Term& set);
    bool rule_nin(State& s, const Term& t, const Term& set, const Constraint& c);
    bool rule_neq(State& s, const Term& a, const Term& b, const Constraint& c);
    bool rule_un(State& s, const Constraint& c);
    bool rule_comp(State& s, const Constraint& c);
    bool rule_pfun(State& s, const Constraint& c);
    bool rule_arith(State& s, const Constraint& c);
    bool rule_foreach(State& s, const Constraint& c);
    bool rule_exists(State& s, const Constraint& c);
    bool rule_call(State& s, const Formula& g);

    Formula instantiate(const Quant& q, const Term& elem);
    Constraint nest_cp(const Constraint& c, const Term& a, const Term& b);
    Formula forall(const Term& ctrl, const Term& dom, const Formula& body, std::vector<std::string> locals = {});
    Formula witness_neq(const Term& a, const Term& b);

    // Final phase
    enum class Final { Progress, Done, Fail };
    Final final_phase(State& s, Solution& out);
    std::map<std::string, detail::Sort> sorts(const State& s) const;
    Term fresh_atom(std::set<std::string>& used);

    SolveOptions opts_;
    Formula input_;
    std::vector<std::string> input_vars_;
    FreshGen fresh_{"N"};
    std::vector<State> open_;
    bool inconclusive_ = false;
    bool aborted_ = false;
    std::string reason_;
    std::size_t steps_ = 0;
    std::set<std::string> seen_;
    std::chrono::steady_clock::time_point start_;
    State* current_ = nullptr;
};

}  // namespace setsolve
