#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "setsolve/eval.hpp"
#include "setsolve/machine.hpp"
#include "setsolve/parser.hpp"
#include "setsolve/solver.hpp"
#include "setsolve/types.hpp"
#include "setsolve/verifier.hpp"

namespace py = pybind11;
using namespace setsolve;

namespace {

py::dict bindings_dict(const Substitution& s)
{
    py::dict d;
    for (const auto& [v, t] : s.bindings())
        d[py::str(v)] = to_string(t);
    return d;
}

py::dict state_dict(const MachineState& s)
{
    py::dict d;
    for (const auto& [v, t] : s)
        d[py::str(v)] = to_string(t);
    return d;
}

Program program_of(const std::optional<std::string>& src)
{
    return src ? parse_program(*src) : Program{};
}

std::map<std::string, Term> terms_of(const std::map<std::string, std::string>& m)
{
    std::map<std::string, Term> out;
    for (const auto& [k, v] : m)
        out[k] = parse_term(v);
    return out;
}

SolveOptions typed(const Formula& f, const Program& prog, bool typecheck_first, double timeout)
{
    SolveOptions so;
    so.program = &prog;
    so.timeout_s = timeout;
    if (!typecheck_first)
        return so;
    TypeCheckResult tc = typecheck_formula(f, &prog);
    if (!tc.ok())
        throw std::invalid_argument("ill-typed formula: " + tc.errors.front().message);
    add_type_domains(so, tc.var_types);
    return so;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Finite-set constraint solver and state-machine verifier";

    py::register_exception<ParseError>(m, "SolveError", PyExc_ValueError);

    m.def(
        "parse_formula", [](const std::string& text) { return to_string(parse_formula(text)); }, py::arg("text"),
        "Parse a formula and return its canonical text.");

    m.def(
        "solve",
        [](const std::string& text, const std::optional<std::string>& program, std::size_t max_solutions,
           double timeout, bool typecheck_first) {
            Formula f = parse_formula(text);
            Program prog = program_of(program);
            SolveOptions so = typed(f, prog, typecheck_first, timeout);
            SolveResult r;
            {
                py::gil_scoped_release nogil;
                r = solve(f, so, max_solutions);
            }
            py::list sols;
            for (const auto& s : r.solutions)
                sols.append(bindings_dict(s.bindings));
            py::dict out;
            out["status"] = status_name(r.status);
            out["solutions"] = sols;
            out["reason"] = r.reason;
            return out;
        },
        py::arg("formula"), py::arg("program") = py::none(), py::arg("max_solutions") = 1,
        py::arg("timeout") = 0.0, py::arg("typecheck") = true,
        "Solve a formula. Returns status ('Sat', 'Unsat' or 'Unknown') and solutions.");

    m.def(
        "prove",
        [](const std::string& text, const std::optional<std::string>& program, double timeout,
           bool typecheck_first) {
            Formula f = parse_formula(text);
            Program prog = program_of(program);
            SolveOptions so = typed(f, prog, typecheck_first, timeout);
            ProofResult r;
            {
                py::gil_scoped_release nogil;
                r = prove(f, so);
            }
            py::dict out;
            out["status"] = proof_name(r.status);
            out["counterexample"] = r.counterexample ? py::object(bindings_dict(r.counterexample->bindings))
                                                     : py::object(py::none());
            out["reason"] = r.reason;
            return out;
        },
        py::arg("formula"), py::arg("program") = py::none(), py::arg("timeout") = 0.0,
        py::arg("typecheck") = true, "Prove a formula by refuting its negation.");

    m.def(
        "negate",
        [](const std::string& text, const std::optional<std::string>& program) {
            Program prog = program_of(program);
            return to_string(negate(parse_formula(text), &prog));
        },
        py::arg("formula"), py::arg("program") = py::none());

    m.def(
        "evaluate",
        [](const std::string& text, const std::map<std::string, std::string>& env,
           const std::optional<std::string>& program) {
            Program prog = program_of(program);
            switch (evaluate(parse_formula(text), terms_of(env), &prog)) {
            case Truth::True:
                return "True";
            case Truth::False:
                return "False";
            default:
                return "Unknown";
            }
        },
        py::arg("formula"), py::arg("env"), py::arg("program") = py::none(),
        "Evaluate a formula whose free variables are bound to ground terms.");

    m.def(
        "typecheck",
        [](const std::string& text, bool machine) {
            std::vector<TypeError> errs =
                machine ? typecheck_machine(parse_machine(text)) : typecheck_program(parse_program(text)).errors;
            std::vector<std::string> out;
            for (const auto& e : errs)
                out.push_back(std::to_string(e.span.line) + ":" + std::to_string(e.span.col) + ": " + e.message);
            return out;
        },
        py::arg("text"), py::arg("machine") = false, "Type errors of a program or machine source.");

    m.def(
        "generate_pos",
        [](const std::string& text, bool strict_wd) {
            py::list out;
            for (const auto& po : generate_pos(parse_machine(text), strict_wd)) {
                py::dict d;
                d["id"] = po.id;
                d["kind"] = po_kind_name(po.kind);
                d["goal"] = to_string(po.goal);
                out.append(d);
            }
            return out;
        },
        py::arg("machine"), py::arg("strict_wd") = false);

    m.def(
        "verify",
        [](const std::string& text, bool auto_hyp, int max_hyp, int jobs, bool strict_wd, double timeout) {
            Machine mach = parse_machine(text);
            VerifyOptions o;
            o.auto_hyp = auto_hyp;
            o.max_hyp = max_hyp;
            o.jobs = jobs;
            o.strict_wd = strict_wd;
            o.timeout_s = timeout;
            std::vector<DischargeReport> reps;
            {
                py::gil_scoped_release nogil;
                reps = verify(mach, o);
            }
            py::list out;
            for (const auto& r : reps) {
                py::dict d;
                d["po_id"] = r.po_id;
                d["kind"] = po_kind_name(r.kind);
                d["status"] = proof_name(r.status);
                d["hypotheses_used"] = r.hypotheses_used;
                d["iterations"] = r.iterations;
                d["time_ms"] = r.time_ms;
                if (r.counterexample) {
                    d["counterexample"] = bindings_dict(*r.counterexample);
                    d["counterexample_checked"] = r.counterexample_checked;
                }
                out.append(d);
            }
            return out;
        },
        py::arg("machine"), py::arg("auto_hyp") = false, py::arg("max_hyp") = 5, py::arg("jobs") = 1,
        py::arg("strict_wd") = false, py::arg("timeout") = 30.0, "Generate and discharge all proof obligations.");

    m.def(
        "animate",
        [](const std::string& text, const std::string& trace, const std::map<std::string, std::string>& carriers,
           const std::optional<std::map<std::string, std::string>>& state) {
            Machine mach = parse_machine(text);
            std::vector<TraceStep> steps = parse_trace(mach, trace);
            std::map<std::string, Term> car;
            for (const auto& [k, v] : carriers)
                car[machine_var(k)] = parse_term(v);
            std::optional<MachineState> start;
            if (state) {
                start.emplace();
                for (const auto& [k, v] : *state)
                    (*start)[machine_var(k)] = parse_term(v);
            }
            py::dict out;
            py::list states;
            try {
                AnimationResult r = animate(mach, steps, car, start);
                for (const auto& s : r.states)
                    states.append(state_dict(s));
                out["log"] = r.log;
                out["failed"] = py::none();
            } catch (const GuardFailed& g) {
                for (const auto& s : g.states)
                    states.append(state_dict(s));
                out["log"] = py::list();
                py::dict f;
                f["event"] = g.event;
                f["step"] = g.step;
                out["failed"] = f;
            }
            out["states"] = states;
            return out;
        },
        py::arg("machine"), py::arg("trace"), py::arg("carriers") = std::map<std::string, std::string>{},
        py::arg("state") = py::none(),
        "Run a trace. 'failed' names the event whose guard did not hold.");
}
