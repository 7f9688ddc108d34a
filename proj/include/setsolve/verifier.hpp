#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "setsolve/machine.hpp"
#include "setsolve/solver.hpp"

namespace setsolve {

enum class PoKind { Init, Wd, Inv };

const char* po_kind_name(PoKind k);

struct ProofObligation {
    std::string id;  // <event>/<label>/<KIND>
    PoKind kind = PoKind::Inv;
    std::string event;
    std::string label;
    Formula goal;
    /// Guards, actions and (for INV) the invariant being preserved.
    std::vector<Labeled> fixed;
    /// Other invariants the discharge strategy may add.
    std::vector<Labeled> pool;
    /// Declared types of the variables occurring in the obligation.
    std::map<std::string, TypeExpr> types;
};

struct VerifyOptions {
    /// Start without pool hypotheses and add them one at a time on failure.
    /// Otherwise all pool hypotheses are used (or `hypotheses` if given).
    bool auto_hyp = false;
    int max_hyp = 5;
    std::optional<std::vector<std::string>> hypotheses;
    bool strict_wd = false;
    std::size_t max_steps = 2'000'000;
    double timeout_s = 30;
    int jobs = 1;
};

struct DischargeReport {
    std::string po_id;
    PoKind kind = PoKind::Inv;
    ProofStatus status = ProofStatus::Unknown;
    std::vector<std::string> hypotheses_used;
    int iterations = 0;
    double time_ms = 0;
    std::optional<Substitution> counterexample;
    /// The counterexample ground-evaluates the negated obligation to true.
    bool counterexample_checked = false;
    std::string reason;
};

std::vector<ProofObligation> generate_pos(const Machine& m, bool strict_wd = false);

/// `fixed & hyps implies goal`; the obligation holds when its negation is
/// unsatisfiable.
Formula po_sequent(const ProofObligation& po, const std::vector<Labeled>& hyps);

DischargeReport discharge(const ProofObligation& po, const VerifyOptions& opts = {});

/// Generates and discharges all obligations; reports keep generation order.
std::vector<DischargeReport> verify(const Machine& m, const VerifyOptions& opts = {});

struct VerifySummary {
    int pos = 0, init = 0, wd = 0, inv = 0;
    int proved = 0, disproved = 0, unknown = 0;
    double time_ms = 0;
};

VerifySummary summarize(const std::vector<DischargeReport>& reports);
std::string report_json(const std::vector<DischargeReport>& reports);
std::string summary_table(const std::string& machine, const VerifySummary& s, bool timing = false);

using MachineState = std::map<std::string, Term>;

struct TraceStep {
    std::string event;
    std::map<std::string, Term> params;  // parameter variable -> value
};

class GuardFailed : public std::runtime_error {
public:
    GuardFailed(std::string ev, std::size_t st, std::vector<MachineState> done)
        : std::runtime_error("guard of " + ev + " fails at step " + std::to_string(st)), event(std::move(ev)),
          step(st), states(std::move(done))
    {
    }
    std::string event;
    std::size_t step;
    std::vector<MachineState> states;
};

struct AnimationResult {
    /// Initial state followed by one state per trace step.
    std::vector<MachineState> states;
    std::vector<std::string> log;
};

/// Executes init (or starts from `start` when given) and then each traced
/// event. `carriers` gives values for context constants; enumerated set
/// constants default to their carrier.
AnimationResult animate(const Machine& m, const std::vector<TraceStep>& trace,
                        const std::map<std::string, Term>& carriers = {},
                        const std::optional<MachineState>& start = std::nullopt, const SolveOptions& opts = {});

/// `name = term` per line, names as written in the machine. Used for
/// carrier and state files.
std::map<std::string, Term> parse_bindings(const Machine& m, std::string_view src);

/// One step per line: `event [param = value, ...]`; `#` starts a comment.
std::vector<TraceStep> parse_trace(const Machine& m, std::string_view src);

}  // namespace setsolve
