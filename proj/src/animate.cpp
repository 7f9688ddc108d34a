#include <algorithm>
#include <set>
#include <sstream>

#include "formula_parser.hpp"
#include "setsolve/eval.hpp"
#include "setsolve/verifier.hpp"

namespace setsolve {

namespace {

std::optional<Term> lookup(const std::map<std::string, Term>& m, const Decl& d)
{
    for (const std::string& k : {d.var, d.source}) {
        auto it = m.find(k);
        if (it != m.end())
            return it->second;
    }
    return std::nullopt;
}

Formula eq(const std::string& v, const Term& t) { return Formula::atom(CKind::Eq, {Term::var(v), t}); }

}  // namespace

AnimationResult animate(const Machine& m, const std::vector<TraceStep>& trace,
                        const std::map<std::string, Term>& carriers, const std::optional<MachineState>& start,
                        const SolveOptions& opts)
{
    FreshGen fresh("M");
    std::vector<Formula> context;
    Env consts;
    for (const auto& c : m.constants) {
        std::optional<Term> v = lookup(carriers, c.decl);
        if (!v)
            v = m.carrier(c);
        if (!v)
            throw std::runtime_error("no value given for constant " + c.decl.source);
        if (!v->is_ground())
            throw std::runtime_error("value of constant " + c.decl.source + " is not ground");
        context.push_back(eq(c.decl.var, *v));
        consts[c.decl.var] = *v;
    }
    std::vector<std::pair<std::string, Formula>> invs;
    for (const auto& i : m.invariants)
        invs.emplace_back(i.label, desugar_formula(i.formula, fresh));

    AnimationResult res;
    auto check_invariants = [&](const MachineState& st, std::size_t step) {
        Env env = consts;
        env.insert(st.begin(), st.end());
        for (const auto& [label, f] : invs) {
            Truth t = evaluate(f, env);
            if (t == Truth::False)
                res.log.push_back("step " + std::to_string(step) + ": invariant " + label + " violated");
            else if (t == Truth::Unknown)
                res.log.push_back("step " + std::to_string(step) + ": invariant " + label + " not evaluated");
        }
    };

    MachineState st;
    if (start) {
        for (const auto& v : m.variables) {
            std::optional<Term> val = lookup(*start, v);
            if (!val || !val->is_ground())
                throw std::runtime_error("start state gives no ground value for " + v.source);
            st[v.var] = *val;
        }
    } else {
        std::vector<Formula> init = context;
        for (const auto& a : m.init)
            init.push_back(desugar_action(a, true, fresh));
        SolveResult r = solve(Formula::conj(init), opts);
        if (r.solutions.empty()) {
            if (r.status == SolveStatus::Unsat)
                throw GuardFailed("INITIALISATION", 0, {});
            throw std::runtime_error("initialisation is inconclusive: " + r.reason);
        }
        for (const auto& v : m.variables) {
            const Term* val = r.solutions[0].bindings.find(v.var);
            if (!val)
                throw std::runtime_error("initialisation leaves " + v.source + " undefined");
            st[v.var] = *val;
        }
    }
    res.states.push_back(st);
    res.log.push_back(start ? "step 0: given state" : "step 0: INITIALISATION");
    check_invariants(st, 0);

    for (std::size_t k = 0; k < trace.size(); ++k) {
        const TraceStep& ts = trace[k];
        const Event* e = m.event(ts.event);
        if (!e)
            throw std::runtime_error("unknown event " + ts.event);
        std::vector<Formula> parts = context;
        for (const auto& [v, val] : st)
            parts.push_back(eq(v, val));
        std::vector<std::string> chosen;
        for (const auto& p : e->params) {
            if (auto val = lookup(ts.params, p))
                parts.push_back(eq(p.var, *val));
            else
                chosen.push_back(p.var);
        }
        for (const auto& [name, val] : ts.params) {
            (void)val;
            bool known = false;
            for (const auto& p : e->params)
                known = known || p.var == name || p.source == name;
            if (!known)
                throw std::runtime_error("event " + e->name + " has no parameter " + name);
        }
        std::set<std::string> written;
        for (const auto& g : e->guards)
            parts.push_back(desugar_formula(g.formula, fresh));
        for (const auto& a : e->actions) {
            parts.push_back(desugar_action(a, false, fresh));
            written.insert(a.target);
        }
        for (const auto& v : m.variables)
            if (!written.count(v.var))
                parts.push_back(eq(primed(v.var), Term::var(v.var)));
        SolveResult sr = solve(Formula::conj(parts), opts);
        if (sr.solutions.empty()) {
            if (sr.status == SolveStatus::Unsat)
                throw GuardFailed(e->name, k + 1, res.states);
            throw std::runtime_error("step " + std::to_string(k + 1) + " is inconclusive: " + sr.reason);
        }
        const Substitution& b = sr.solutions[0].bindings;
        std::string line = "step " + std::to_string(k + 1) + ": " + e->name;
        for (const auto& c : chosen)
            if (const Term* v = b.find(c))
                line += " " + c + "=" + to_string(*v) + " (chosen)";
        res.log.push_back(line);
        MachineState next;
        for (const auto& v : m.variables) {
            const Term* val = b.find(primed(v.var));
            if (!val)
                throw std::runtime_error(e->name + " leaves " + v.source + " undefined");
            next[v.var] = *val;
        }
        st = std::move(next);
        res.states.push_back(st);
        check_invariants(st, k + 1);
    }
    return res;
}

std::map<std::string, Term> parse_bindings(const Machine& m, std::string_view src)
{
    std::map<std::string, Term> out;
    std::set<std::string> known;
    for (const auto& c : m.constants)
        known.insert(c.decl.var);
    for (const auto& v : m.variables)
        known.insert(v.var);
    detail::FormulaParser p(detail::tokenize(src, true));
    while (!p.at_end()) {
        Span s = p.peek().span;
        std::string name = machine_var(p.next().text);
        if (!known.count(name))
            throw ParseError("unknown identifier " + name, s);
        p.expect("=");
        Term v = p.term();
        if (!v.is_ground())
            throw ParseError("value of " + name + " must be ground", s);
        out[name] = v;
        p.accept(".");
    }
    return out;
}

std::vector<TraceStep> parse_trace(const Machine& m, std::string_view src)
{
    std::vector<TraceStep> out;
    std::istringstream in{std::string(src)};
    std::string line;
    while (std::getline(in, line)) {
        detail::FormulaParser p(detail::tokenize(line, true));
        if (p.at_end())
            continue;
        TraceStep ts;
        ts.event = p.next().text;
        const Event* e = m.event(ts.event);
        if (!e)
            throw ParseError("unknown event " + ts.event, p.peek().span);
        while (!p.at_end()) {
            detail::Token id = p.next();
            std::string name = machine_var(id.text);
            bool known = std::any_of(e->params.begin(), e->params.end(),
                                     [&](const Decl& d) { return d.var == name; });
            if (!known)
                throw ParseError("event " + ts.event + " has no parameter " + id.text, id.span);
            p.expect("=");
            Term v = p.term();
            ts.params[name] = v;
            if (!p.accept(",") && !p.at_end())
                p.fail("expected ','");
        }
        out.push_back(std::move(ts));
    }
    return out;
}

}  // namespace setsolve
