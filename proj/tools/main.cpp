#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "setsolve/eval.hpp"
#include "setsolve/machine.hpp"
#include "setsolve/parser.hpp"
#include "setsolve/solver.hpp"
#include "setsolve/types.hpp"
#include "setsolve/verifier.hpp"

using namespace setsolve;

namespace {

enum Exit { kOk = 0, kFailed = 1, kUnknown = 2, kUsage = 3 };

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool ends_with(const std::string& s, const std::string& suffix)
{
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct Goals {
    Program program;
    std::vector<Formula> formulas;
};

Goals load_goals(const std::string& file, const std::string& expr, const std::string& program)
{
    Goals g;
    if (!program.empty())
        g.program = parse_program(read_file(program));
    if (!expr.empty()) {
        g.formulas.push_back(parse_formula(expr));
    } else if (!file.empty()) {
        Program p = parse_program(read_file(file));
        for (const auto& q : p.queries)
            g.formulas.push_back(q.formula);
        g.program.merge(p);
    } else {
        throw InputError("give a FILE or -e EXPR");
    }
    return g;
}

void print_type_errors(const std::string& where, const std::vector<TypeError>& errs)
{
    for (const auto& e : errs)
        std::cerr << where << ":" << e.span.line << ":" << e.span.col << ": type error: " << e.message << "\n";
}

SolveOptions typed_options(const Goals& g, const Formula& f, bool untyped, double timeout)
{
    SolveOptions so;
    so.program = &g.program;
    so.timeout_s = timeout;
    if (untyped)
        return so;
    TypeCheckResult tc = typecheck_formula(f, &g.program);
    if (!tc.ok()) {
        print_type_errors("<query>", tc.errors);
        throw InputError("query is ill-typed (use --untyped to skip type checking)");
    }
    add_type_domains(so, tc.var_types);
    return so;
}

void check_program(const Goals& g, bool untyped)
{
    if (untyped)
        return;
    TypeCheckResult tc = typecheck_program(g.program);
    if (!tc.ok()) {
        print_type_errors("<program>", tc.errors);
        throw InputError("program is ill-typed (use --untyped to skip type checking)");
    }
}

void print_bindings(const Substitution& s)
{
    const auto& b = s.bindings();
    if (b.empty()) {
        std::cout << "yes\n";
        return;
    }
    std::size_t i = 0;
    for (const auto& [v, t] : b)
        std::cout << v << " = " << to_string(t) << (++i < b.size() ? ",\n" : "\n");
}

void print_solution(const Solution& sol)
{
    print_bindings(sol.bindings);
    if (!sol.residual.empty()) {
        std::cout << "Constraint: ";
        for (std::size_t i = 0; i < sol.residual.size(); ++i)
            std::cout << (i ? ", " : "") << to_string(sol.residual[i]);
        std::cout << "\n";
    }
}

int combine(int a, int b)
{
    if (a == kUnknown || b == kUnknown)
        return kUnknown;
    return std::max(a, b);
}

struct SolveArgs {
    std::string file, expr, program;
    bool all = false, untyped = false;
    double timeout = 0;
    std::size_t max_solutions = 100;
};

int run_solve(const SolveArgs& a)
{
    Goals g = load_goals(a.file, a.expr, a.program);
    check_program(g, a.untyped);
    int code = kOk;
    for (std::size_t qi = 0; qi < g.formulas.size(); ++qi) {
        const Formula& f = g.formulas[qi];
        if (g.formulas.size() > 1)
            std::cout << (qi ? "\n" : "") << "?- " << to_string(f) << "\n";
        SolveOptions so = typed_options(g, f, a.untyped, a.timeout);
        SolutionStream stream(f, so);
        std::size_t n = 0;
        std::size_t limit = a.all ? a.max_solutions : 1;
        while (n < limit) {
            auto sol = stream.next();
            if (!sol)
                break;
            if (n++)
                std::cout << "\n";
            print_solution(*sol);
        }
        if (n == 0) {
            if (stream.exhausted_status() == SolveStatus::Unsat) {
                std::cout << "Unsat.\n";
                code = combine(code, kFailed);
            } else {
                std::cout << "Unknown.";
                if (!stream.reason().empty())
                    std::cout << " (" << stream.reason() << ")";
                std::cout << "\n";
                code = combine(code, kUnknown);
            }
        }
    }
    return code;
}

int run_prove(const SolveArgs& a)
{
    Goals g = load_goals(a.file, a.expr, a.program);
    check_program(g, a.untyped);
    int code = kOk;
    for (std::size_t qi = 0; qi < g.formulas.size(); ++qi) {
        const Formula& f = g.formulas[qi];
        if (g.formulas.size() > 1)
            std::cout << (qi ? "\n" : "") << "?- " << to_string(f) << "\n";
        SolveOptions so = typed_options(g, f, a.untyped, a.timeout);
        ProofResult r = prove(f, so);
        switch (r.status) {
        case ProofStatus::Proved:
            std::cout << "Theorem.\n";
            break;
        case ProofStatus::Disproved:
            std::cout << "Counterexample:\n";
            print_solution(*r.counterexample);
            code = combine(code, kFailed);
            break;
        case ProofStatus::Unknown:
            std::cout << "Unknown.";
            if (!r.reason.empty())
                std::cout << " (" << r.reason << ")";
            std::cout << "\n";
            code = combine(code, kUnknown);
            break;
        }
    }
    return code;
}

int run_typecheck(const std::string& file)
{
    std::vector<TypeError> errs;
    if (ends_with(file, ".smch")) {
        errs = typecheck_machine(parse_machine(read_file(file)));
    } else {
        errs = typecheck_program(parse_program(read_file(file))).errors;
    }
    print_type_errors(file, errs);
    if (!errs.empty())
        return kFailed;
    std::cout << "ok\n";
    return kOk;
}

Machine load_checked_machine(const std::string& file, bool untyped)
{
    Machine m = parse_machine(read_file(file));
    if (!untyped) {
        auto errs = typecheck_machine(m);
        if (!errs.empty()) {
            print_type_errors(file, errs);
            throw InputError("machine is ill-typed (use --untyped to skip type checking)");
        }
    }
    return m;
}

struct VerifyArgs {
    std::string file, po, json;
    bool untyped = false, timing = false;
    VerifyOptions opts;
};

int run_verify(VerifyArgs a)
{
    Machine m = load_checked_machine(a.file, a.untyped);
    std::vector<DischargeReport> reports;
    if (a.po.empty()) {
        reports = verify(m, a.opts);
    } else {
        bool found = false;
        for (const auto& po : generate_pos(m, a.opts.strict_wd))
            if (po.id == a.po) {
                reports.push_back(discharge(po, a.opts));
                found = true;
            }
        if (!found)
            throw InputError("no proof obligation " + a.po);
    }
    int code = kOk;
    std::ostringstream os;
    for (const auto& r : reports) {
        os << r.po_id << ": " << proof_name(r.status);
        if (!r.hypotheses_used.empty()) {
            os << " [";
            for (std::size_t i = 0; i < r.hypotheses_used.size(); ++i)
                os << (i ? ", " : "") << r.hypotheses_used[i];
            os << "]";
        }
        os << "\n";
        if (r.counterexample)
            for (const auto& [v, t] : r.counterexample->bindings())
                os << "    " << v << " = " << to_string(t) << "\n";
        if (r.status == ProofStatus::Unknown && !r.reason.empty())
            os << "    reason: " << r.reason << "\n";
        if (r.status == ProofStatus::Disproved)
            code = combine(code, kFailed);
        else if (r.status == ProofStatus::Unknown)
            code = combine(code, kUnknown);
    }
    os << "\n" << summary_table(m.name, summarize(reports), a.timing);
    if (a.json == "-") {
        std::cout << report_json(reports) << "\n";
        return code;
    }
    std::cout << os.str();
    if (!a.json.empty()) {
        std::ofstream out(a.json);
        if (!out)
            throw InputError("cannot write " + a.json);
        out << report_json(reports);
    }
    return code;
}

struct AnimateArgs {
    std::string file, trace, carriers, state;
    bool untyped = false;
};

void print_state(std::size_t k, const MachineState& s)
{
    std::cout << "state " << k << ":\n";
    for (const auto& [v, t] : s)
        std::cout << "  " << v << " = " << to_string(t) << "\n";
}

int run_animate(const AnimateArgs& a)
{
    Machine m = load_checked_machine(a.file, a.untyped);
    std::vector<TraceStep> trace = parse_trace(m, read_file(a.trace));
    std::map<std::string, Term> carriers;
    if (!a.carriers.empty())
        carriers = parse_bindings(m, read_file(a.carriers));
    std::optional<MachineState> start;
    if (!a.state.empty())
        start = parse_bindings(m, read_file(a.state));
    try {
        AnimationResult r = animate(m, trace, carriers, start);
        for (std::size_t k = 0; k < r.states.size(); ++k)
            print_state(k, r.states[k]);
        for (const auto& l : r.log)
            std::cout << l << "\n";
        return kOk;
    } catch (const GuardFailed& g) {
        for (std::size_t k = 0; k < g.states.size(); ++k)
            print_state(k, g.states[k]);
        std::cout << "GuardFailed: " << g.event << " at step " << g.step << "\n";
        return kFailed;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Finite-set constraint solver and state-machine verifier"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto add_solve_opts = [&](CLI::App* sub) {
        sub->add_option("file", solve_args.file, ".slog file whose queries are run");
        sub->add_option("-e,--expr", solve_args.expr, "formula given on the command line");
        sub->add_option("-p,--program", solve_args.program, ".slog file with clauses used by the formula");
        sub->add_option("--timeout", solve_args.timeout, "wall-clock limit per query in seconds");
        sub->add_flag("--untyped", solve_args.untyped, "skip type checking");
    };
    CLI::App* solve_cmd = app.add_subcommand("solve", "find solutions of a formula");
    add_solve_opts(solve_cmd);
    solve_cmd->add_flag("--all", solve_args.all, "print every solution");
    solve_cmd->add_option("--max-solutions", solve_args.max_solutions, "bound for --all");
    CLI::App* prove_cmd = app.add_subcommand("prove", "prove a formula by refuting its negation");
    add_solve_opts(prove_cmd);

    std::string tc_file;
    CLI::App* tc_cmd = app.add_subcommand("typecheck", "type check a .slog or .smch file");
    tc_cmd->add_option("file", tc_file)->required();

    VerifyArgs va;
    CLI::App* verify_cmd = app.add_subcommand("verify", "generate and discharge proof obligations");
    verify_cmd->add_option("file", va.file)->required();
    verify_cmd->add_option("--po", va.po, "discharge a single obligation");
    verify_cmd->add_flag("--auto-hyp", va.opts.auto_hyp, "add invariant hypotheses one at a time");
    verify_cmd->add_option("--max-hyp", va.opts.max_hyp, "iteration bound for --auto-hyp");
    verify_cmd->add_option("--json", va.json, "write a JSON report to a file, or to stdout with -");
    verify_cmd->add_option("--jobs", va.opts.jobs, "parallel workers");
    verify_cmd->add_option("--timeout", va.opts.timeout_s, "wall-clock limit per solver call in seconds");
    verify_cmd->add_flag("--strict-wd", va.opts.strict_wd, "require pfun for function application");
    verify_cmd->add_flag("--timing", va.timing, "add a time column to the summary");
    verify_cmd->add_flag("--untyped", va.untyped, "skip type checking");

    AnimateArgs aa;
    CLI::App* animate_cmd = app.add_subcommand("animate", "execute a machine along a trace");
    animate_cmd->add_option("file", aa.file)->required();
    animate_cmd->add_option("--trace", aa.trace, "trace file")->required();
    animate_cmd->add_option("--carriers", aa.carriers, "values of context constants");
    animate_cmd->add_option("--state", aa.state, "start state instead of init");
    animate_cmd->add_flag("--untyped", aa.untyped, "skip type checking");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*solve_cmd)
            return run_solve(solve_args);
        if (*prove_cmd)
            return run_prove(solve_args);
        if (*tc_cmd)
            return run_typecheck(tc_file);
        if (*verify_cmd)
            return run_verify(va);
        if (*animate_cmd)
            return run_animate(aa);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kUsage;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const NotNegatable& e) {
        std::cerr << "cannot negate: " << e.what() << "\n";
        return kUnknown;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
