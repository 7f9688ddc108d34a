#include "setsolve/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "setsolve/eval.hpp"

namespace setsolve {

const char* po_kind_name(PoKind k)
{
    switch (k) {
    case PoKind::Init:
        return "INIT";
    case PoKind::Wd:
        return "WD";
    case PoKind::Inv:
        return "INV";
    }
    return "?";
}

namespace {

std::set<std::string> fv_set(const Formula& f)
{
    std::vector<std::string> v;
    free_vars(f, v);
    return {v.begin(), v.end()};
}

std::vector<Formula> conjuncts(const Formula& f)
{
    if (f.is(FKind::And)) {
        auto l = conjuncts(f.left());
        auto r = conjuncts(f.right());
        l.insert(l.end(), r.begin(), r.end());
        return l;
    }
    return {f};
}

struct App {
    Term term;
    std::vector<const Quant*> scope;
};

void apps_in_term(const Term& t, const std::vector<const Quant*>& scope, std::vector<App>& out)
{
    switch (t.kind()) {
    case TermKind::Pair:
    case TermKind::ExtSet:
    case TermKind::CP:
    case TermKind::Interval:
    case TermKind::Arith:
        apps_in_term(t.lhs(), scope, out);
        apps_in_term(t.rhs(), scope, out);
        return;
    case TermKind::Apply:
        apps_in_term(t.lhs(), scope, out);
        apps_in_term(t.rhs(), scope, out);
        out.push_back({t, scope});
        return;
    default:
        return;
    }
}

void apps_in_formula(const Formula& f, std::vector<const Quant*>& scope, std::vector<App>& out)
{
    switch (f.kind()) {
    case FKind::Atom: {
        const Constraint& c = f.constraint();
        if (c.q) {
            apps_in_term(c.q->domain, scope, out);
            scope.push_back(c.q.get());
            apps_in_formula(c.q->func, scope, out);
            apps_in_formula(c.q->body, scope, out);
            scope.pop_back();
            return;
        }
        for (const auto& a : c.args)
            apps_in_term(a, scope, out);
        return;
    }
    case FKind::And:
    case FKind::Or:
    case FKind::Implies:
    case FKind::Let:
        apps_in_formula(f.left(), scope, out);
        apps_in_formula(f.right(), scope, out);
        return;
    case FKind::Neg:
        apps_in_formula(f.left(), scope, out);
        return;
    default:
        return;
    }
}

/// Definedness of f(x): x in dom f (as ncomp({[x,x]},f,{})) and f locally
/// functional at x, or pfun(f) in strict mode.
Formula wd_goal(const App& app, bool strict, FreshGen& fresh)
{
    Term f = app.term.lhs();
    Term x = app.term.rhs();
    Formula in_dom = Formula::atom(CKind::Ncomp, {Term::set_of({Term::pair(x, x)}), f, Term::empty()});
    Formula func;
    if (strict) {
        func = Formula::atom(CKind::Pfun, {f});
    } else {
        Term p1 = fresh.var(), q1 = fresh.var(), p2 = fresh.var(), q2 = fresh.var();
        Formula body = Formula::disj({Formula::atom(CKind::Neq, {p1, x}), Formula::atom(CKind::Neq, {p2, x}),
                                      Formula::atom(CKind::Eq, {q1, q2})});
        Constraint inner = make_quant(CKind::Foreach, Term::pair(p2, q2), f, {}, body);
        func = Formula::atom(make_quant(CKind::Foreach, Term::pair(p1, q1), f, {}, Formula::atom(inner)));
    }
    Formula goal = Formula::conj(in_dom, func);
    for (auto it = app.scope.rbegin(); it != app.scope.rend(); ++it) {
        const Quant& q = **it;
        goal = Formula::atom(make_quant(CKind::Foreach, q.ctrl, q.domain, q.locals, goal, q.func));
    }
    return desugar_formula(goal, fresh);
}

std::string unique_label(const std::string& base, std::map<std::string, int>& used)
{
    int n = ++used[base];
    return n == 1 ? base : base + "#" + std::to_string(n);
}

}  // namespace

std::vector<ProofObligation> generate_pos(const Machine& m, bool strict_wd)
{
    FreshGen fresh("M");
    FreshGen wfresh("W");
    const auto declared = m.declared_types();
    const auto tmap = m.type_map();

    std::vector<Labeled> invs;
    for (const auto& i : m.invariants)
        invs.push_back({i.label, desugar_formula(i.formula, fresh), i.span});
    auto others = [&](const std::string& label) {
        std::vector<Labeled> out;
        for (const auto& i : invs)
            if (i.label != label)
                out.push_back(i);
        return out;
    };

    std::vector<ProofObligation> pos;
    auto finish = [&](ProofObligation po, const std::map<std::string, TypeExpr>& types) {
        auto ann = m.annotations.find(po.id);
        if (ann != m.annotations.end()) {
            const PoAnnotation& a = ann->second;
            if (a.closed_domain)
                for (const auto& c : m.constants)
                    if (auto car = m.carrier(c))
                        po.fixed.push_back({"closed_" + c.decl.source,
                                            Formula::atom(CKind::Eq, {Term::var(c.decl.var), *car}),
                                            c.decl.span});
            auto dropped = [&](const Labeled& l) {
                return std::find(a.drop.begin(), a.drop.end(), l.label) != a.drop.end();
            };
            po.fixed.erase(std::remove_if(po.fixed.begin(), po.fixed.end(), dropped), po.fixed.end());
            po.pool.erase(std::remove_if(po.pool.begin(), po.pool.end(), dropped), po.pool.end());
        }
        std::set<std::string> vars = fv_set(po_sequent(po, po.pool));
        for (const auto& [v, t] : types)
            if (vars.count(v))
                po.types[v] = t;
        pos.push_back(std::move(po));
    };

    // Initialisation
    std::vector<Labeled> init;
    for (const auto& a : m.init)
        init.push_back({a.label, desugar_action(a, true, fresh), a.span});
    for (const auto& i : invs) {
        ProofObligation po;
        po.id = "INITIALISATION/" + i.label + "/INIT";
        po.kind = PoKind::Init;
        po.event = "INITIALISATION";
        po.label = i.label;
        po.goal = i.formula;
        po.fixed = init;
        finish(std::move(po), declared);
    }
    {
        std::map<std::string, int> used;
        for (const auto& a : m.init) {
            std::vector<App> apps;
            apps_in_term(a.value, {}, apps);
            if (a.index)
                apps_in_term(*a.index, {}, apps);
            for (const auto& app : apps) {
                ProofObligation po;
                po.label = unique_label(a.label, used);
                po.id = "INITIALISATION/" + po.label + "/WD";
                po.kind = PoKind::Wd;
                po.event = "INITIALISATION";
                po.goal = wd_goal(app, strict_wd, wfresh);
                finish(std::move(po), declared);
            }
        }
    }

    for (const auto& e : m.events) {
        auto types = declared;
        for (const auto& p : e.params)
            if (p.type)
                types[p.var] = resolve_type(*p.type, tmap);

        std::vector<Labeled> guards;
        std::map<std::string, int> used;
        std::vector<ProofObligation> wds;
        for (const auto& g : e.guards) {
            std::vector<Formula> parts = conjuncts(g.formula);
            for (std::size_t k = 0; k < parts.size(); ++k) {
                std::vector<App> apps;
                std::vector<const Quant*> scope;
                apps_in_formula(parts[k], scope, apps);
                for (const auto& app : apps) {
                    ProofObligation po;
                    po.label = unique_label(g.label, used);
                    po.id = e.name + "/" + po.label + "/WD";
                    po.kind = PoKind::Wd;
                    po.event = e.name;
                    po.goal = wd_goal(app, strict_wd, wfresh);
                    po.fixed = guards;
                    if (k > 0)
                        po.fixed.push_back({g.label, desugar_formula(Formula::conj(std::vector<Formula>(
                                                                         parts.begin(), parts.begin() + k)),
                                                                     fresh),
                                            g.span});
                    po.pool = invs;
                    wds.push_back(std::move(po));
                }
            }
            guards.push_back({g.label, desugar_formula(g.formula, fresh), g.span});
        }
        std::vector<Labeled> actions;
        std::set<std::string> written;
        for (const auto& a : e.actions) {
            std::vector<App> apps;
            if (a.index)
                apps_in_term(*a.index, {}, apps);
            apps_in_term(a.value, {}, apps);
            for (const auto& app : apps) {
                ProofObligation po;
                po.label = unique_label(a.label, used);
                po.id = e.name + "/" + po.label + "/WD";
                po.kind = PoKind::Wd;
                po.event = e.name;
                po.goal = wd_goal(app, strict_wd, wfresh);
                po.fixed = guards;
                po.pool = invs;
                wds.push_back(std::move(po));
            }
            actions.push_back({a.label, desugar_action(a, false, fresh), a.span});
            written.insert(a.target);
        }
        for (auto& po : wds)
            finish(std::move(po), types);

        std::map<std::string, Term> prime;
        for (const auto& w : written)
            prime.emplace(w, Term::var(primed(w)));
        for (const auto& i : invs) {
            std::set<std::string> fv = fv_set(i.formula);
            if (std::none_of(written.begin(), written.end(), [&](const std::string& w) { return fv.count(w); }))
                continue;
            ProofObligation po;
            po.id = e.name + "/" + i.label + "/INV";
            po.kind = PoKind::Inv;
            po.event = e.name;
            po.label = i.label;
            po.goal = replace_vars(i.formula, prime);
            po.fixed.push_back(i);
            po.fixed.insert(po.fixed.end(), guards.begin(), guards.end());
            po.fixed.insert(po.fixed.end(), actions.begin(), actions.end());
            po.pool = others(i.label);
            finish(std::move(po), types);
        }
    }
    return pos;
}

Formula po_sequent(const ProofObligation& po, const std::vector<Labeled>& hyps)
{
    std::vector<Formula> ante;
    for (const auto& f : po.fixed)
        ante.push_back(f.formula);
    for (const auto& h : hyps)
        ante.push_back(h.formula);
    return Formula::implies(Formula::conj(ante), po.goal);
}

DischargeReport discharge(const ProofObligation& po, const VerifyOptions& opts)
{
    auto t0 = std::chrono::steady_clock::now();
    DischargeReport rep;
    rep.po_id = po.id;
    rep.kind = po.kind;

    SolveOptions so;
    so.max_steps = opts.max_steps;
    so.timeout_s = opts.timeout_s;
    add_type_domains(so, po.types);

    ProofResult last;
    std::vector<Labeled> hyps;
    auto attempt = [&](const std::vector<Labeled>& hs) {
        Formula seq = po_sequent(po, hs);
        last = prove(seq, so);
        ++rep.iterations;
        hyps = hs;
        return seq;
    };

    Formula seq;
    if (opts.hypotheses) {
        std::vector<Labeled> hs;
        for (const auto& l : po.pool)
            if (std::find(opts.hypotheses->begin(), opts.hypotheses->end(), l.label) != opts.hypotheses->end())
                hs.push_back(l);
        seq = attempt(hs);
    } else if (!opts.auto_hyp) {
        seq = attempt(po.pool);
    } else {
        std::vector<Labeled> selected;
        seq = attempt(selected);
        while (last.status != ProofStatus::Proved && static_cast<int>(selected.size()) < opts.max_hyp) {
            std::set<std::string> failing = fv_set(seq);
            const Labeled* best = nullptr;
            std::size_t best_score = 0;
            for (const auto& cand : po.pool) {
                if (std::any_of(selected.begin(), selected.end(),
                                [&](const Labeled& s) { return s.label == cand.label; }))
                    continue;
                std::size_t score = 0;
                for (const auto& v : fv_set(cand.formula))
                    score += failing.count(v);
                if (score > best_score) {
                    best = &cand;
                    best_score = score;
                }
            }
            if (!best)
                break;
            selected.push_back(*best);
            seq = attempt(selected);
        }
        if (last.status != ProofStatus::Proved && selected.size() < po.pool.size()) {
            Formula full = attempt(po.pool);
            seq = full;
        }
    }

    rep.status = last.status;
    rep.reason = last.reason;
    for (const auto& h : hyps)
        rep.hypotheses_used.push_back(h.label);
    if (last.status == ProofStatus::Disproved && last.counterexample) {
        rep.counterexample = last.counterexample->bindings;
        Formula neg = negate(seq);
        rep.counterexample_checked = evaluate(neg, rep.counterexample->bindings()) == Truth::True;
    }
    rep.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::vector<DischargeReport> verify(const Machine& m, const VerifyOptions& opts)
{
    std::vector<ProofObligation> pos = generate_pos(m, opts.strict_wd);
    std::vector<DischargeReport> out(pos.size());
    auto work = [&](std::size_t i) {
        try {
            out[i] = discharge(pos[i], opts);
        } catch (const std::exception& e) {
            out[i].po_id = pos[i].id;
            out[i].kind = pos[i].kind;
            out[i].status = ProofStatus::Unknown;
            out[i].reason = e.what();
        }
    };
    std::size_t jobs = static_cast<std::size_t>(std::max(1, opts.jobs));
    if (jobs == 1 || pos.size() < 2) {
        for (std::size_t i = 0; i < pos.size(); ++i)
            work(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < std::min(jobs, pos.size()); ++j)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < pos.size();)
                work(i);
        });
    for (auto& t : pool)
        t.join();
    return out;
}

VerifySummary summarize(const std::vector<DischargeReport>& reports)
{
    VerifySummary s;
    for (const auto& r : reports) {
        ++s.pos;
        (r.kind == PoKind::Init ? s.init : r.kind == PoKind::Wd ? s.wd : s.inv)++;
        (r.status == ProofStatus::Proved ? s.proved : r.status == ProofStatus::Disproved ? s.disproved : s.unknown)++;
        s.time_ms += r.time_ms;
    }
    return s;
}

std::string report_json(const std::vector<DischargeReport>& reports)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        nlohmann::ordered_json j;
        j["po_id"] = r.po_id;
        j["kind"] = po_kind_name(r.kind);
        j["status"] = proof_name(r.status);
        j["hypotheses_used"] = r.hypotheses_used;
        j["iterations"] = r.iterations;
        j["time_ms"] = r.time_ms;
        if (r.counterexample) {
            nlohmann::ordered_json cex = nlohmann::ordered_json::object();
            for (const auto& [v, t] : r.counterexample->bindings())
                cex[v] = to_string(t);
            j["counterexample"] = cex;
            j["counterexample_checked"] = r.counterexample_checked;
        }
        if (!r.reason.empty())
            j["reason"] = r.reason;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::string summary_table(const std::string& machine, const VerifySummary& s, bool timing)
{
    std::ostringstream os;
    std::size_t w = std::max<std::size_t>(machine.size(), 7);
    os << std::left << std::setw(static_cast<int>(w)) << "Machine" << std::right << std::setw(6) << "PO"
       << std::setw(6) << "INIT" << std::setw(6) << "WD" << std::setw(6) << "INV" << std::setw(8) << "Proved"
       << std::setw(11) << "Disproved" << std::setw(9) << "Unknown";
    if (timing)
        os << std::setw(10) << "time";
    os << "\n";
    os << std::left << std::setw(static_cast<int>(w)) << machine << std::right << std::setw(6) << s.pos
       << std::setw(6) << s.init << std::setw(6) << s.wd << std::setw(6) << s.inv << std::setw(8) << s.proved
       << std::setw(11) << s.disproved << std::setw(9) << s.unknown;
    if (timing) {
        std::ostringstream t;
        t << std::fixed << std::setprecision(2) << s.time_ms / 1000.0 << "s";
        os << std::setw(10) << t.str();
    }
    os << "\n";
    return os.str();
}

}  // namespace setsolve
