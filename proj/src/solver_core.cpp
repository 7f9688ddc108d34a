#include <algorithm>

#include "setsolve/arith.hpp"
#include "setsolve/eval.hpp"
#include "solver_engine.hpp"

namespace setsolve {

using detail::Sort;
using detail::State;

namespace {

std::uint64_t constraint_mask(const Constraint& c)
{
    std::uint64_t m = 0;
    for (const Term& t : c.args)
        m |= t.var_mask();
    if (c.q)
        m |= c.q->mask;
    return m;
}

std::size_t level_of(const Formula& f)
{
    switch (f.kind()) {
    case FKind::Or:
    case FKind::Call:
        return 4;
    case FKind::Atom:
        switch (f.constraint().kind) {
        case CKind::Eq:
        case CKind::Is:
        case CKind::Le:
        case CKind::Lt:
            return 0;
        case CKind::In:
        case CKind::Nin:
        case CKind::Neq:
            return 1;
        case CKind::Foreach:
        case CKind::Exists:
            return 3;
        default:
            return 2;
        }
    default:
        return 0;
    }
}

void collect_atoms(const Term& t, std::set<std::string>& out)
{
    if (!t)
        return;
    if (t.is(TermKind::Atom)) {
        out.insert(t.name());
        return;
    }
    if (t.lhs())
        collect_atoms(t.lhs(), out);
    if (t.rhs())
        collect_atoms(t.rhs(), out);
}

void collect_atoms(const Formula& f, std::set<std::string>& out);

void collect_atoms(const Constraint& c, std::set<std::string>& out)
{
    for (const Term& t : c.args)
        collect_atoms(t, out);
    if (c.q) {
        collect_atoms(c.q->ctrl, out);
        collect_atoms(c.q->domain, out);
        collect_atoms(c.q->body, out);
        collect_atoms(c.q->func, out);
    }
}

void collect_atoms(const Formula& f, std::set<std::string>& out)
{
    if (!f)
        return;
    switch (f.kind()) {
    case FKind::Atom:
        collect_atoms(f.constraint(), out);
        break;
    case FKind::Call:
        for (const Term& t : f.args())
            collect_atoms(t, out);
        break;
    case FKind::True:
    case FKind::False:
        break;
    default:
        collect_atoms(f.left(), out);
        collect_atoms(f.right(), out);
        break;
    }
}

}  // namespace

const char* status_name(SolveStatus s)
{
    switch (s) {
    case SolveStatus::Sat: return "Sat";
    case SolveStatus::Unsat: return "Unsat";
    default: return "Unknown";
    }
}

const char* proof_name(ProofStatus s)
{
    switch (s) {
    case ProofStatus::Proved: return "Proved";
    case ProofStatus::Disproved: return "Disproved";
    default: return "Unknown";
    }
}

SolverEngine::SolverEngine(const Formula& f, SolveOptions opts) : opts_(std::move(opts))
{
    FreshGen q("Q");
    input_ = rename_bound(f, q);
    free_vars(input_, input_vars_);
    start_ = std::chrono::steady_clock::now();
    State s;
    push(s, input_);
    open_.push_back(std::move(s));
}

SolveStatus SolverEngine::exhausted_status() const
{
    return (aborted_ || inconclusive_) ? SolveStatus::Unknown : SolveStatus::Unsat;
}

void SolverEngine::inconclusive(const std::string& why)
{
    inconclusive_ = true;
    if (reason_.empty())
        reason_ = why;
}

bool SolverEngine::budget_exceeded()
{
    ++steps_;
    if (steps_ > opts_.max_steps) {
        aborted_ = true;
        reason_ = "step limit reached";
        return true;
    }
    if (opts_.timeout_s > 0 && (steps_ & 255U) == 0) {
        std::chrono::duration<double> el = std::chrono::steady_clock::now() - start_;
        if (el.count() > opts_.timeout_s) {
            aborted_ = true;
            reason_ = "time limit reached";
            return true;
        }
    }
    return false;
}

std::optional<Solution> SolverEngine::next()
{
    while (!open_.empty() && !aborted_) {
        State s = std::move(open_.back());
        open_.pop_back();
        Solution sol;
        Run r = run(s, sol);
        if (r == Run::Abort)
            break;
        if (r != Run::Solution)
            continue;
        std::string key;
        for (const auto& [v, t] : sol.bindings.bindings())
            key += v + "=" + to_string(t) + ";";
        if (!seen_.insert(key).second)
            continue;
        return sol;
    }
    return std::nullopt;
}

void SolverEngine::push(State& s, const Formula& f)
{
    if (f.is(FKind::True))
        return;
    if (f.is(FKind::And)) {
        push(s, f.right());
        push(s, f.left());
        return;
    }
    s.goals[level_of(f)].push_back(f);
}

void SolverEngine::push(State& s, CKind k, std::vector<Term> args) { push(s, Formula::atom(k, std::move(args))); }

void SolverEngine::branch(State& s, const std::vector<Formula>& alts)
{
    if (alts.empty()) {
        push(s, Formula::falsity());
        return;
    }
    for (std::size_t i = alts.size(); i-- > 1;) {
        State c = s;
        push(c, alts[i]);
        open_.push_back(std::move(c));
    }
    push(s, alts[0]);
}

bool SolverEngine::bind(State& s, const std::string& var, const Term& t)
{
    if (!s.subst.bind(var, t))
        return false;
    std::uint64_t bit = var_bit(var);
    std::vector<Constraint> keep;
    for (auto& c : s.store) {
        if (constraint_mask(c) & bit)
            push(s, Formula::atom(std::move(c)));
        else
            keep.push_back(std::move(c));
    }
    s.store = std::move(keep);
    return true;
}

void SolverEngine::store(State& s, Constraint c) { s.store.push_back(std::move(c)); }

SolverEngine::Run SolverEngine::run(State& s, Solution& out)
{
    while (true) {
        if (budget_exceeded())
            return Run::Abort;
        bool found = false;
        for (auto& level : s.goals) {
            if (level.empty())
                continue;
            Formula g = std::move(level.back());
            level.pop_back();
            found = true;
            if (!step_goal(s, g)) {
                if (s.committed)
                    inconclusive("no model found for the solved form");
                return Run::Fail;
            }
            break;
        }
        if (found)
            continue;
        switch (final_phase(s, out)) {
        case Final::Progress:
            continue;
        case Final::Done:
            return Run::Solution;
        case Final::Fail:
            return Run::Fail;
        }
    }
}

bool SolverEngine::step_goal(State& s, const Formula& g)
{
    switch (g.kind()) {
    case FKind::True:
        return true;
    case FKind::False:
        return false;
    case FKind::And:
        push(s, g);
        return true;
    case FKind::Or:
        branch(s, {g.left(), g.right()});
        return true;
    case FKind::Neg:
    case FKind::Implies:
        try {
            Formula n = negate(g.is(FKind::Neg) ? g.left() : g.left(), opts_.program, fresh_);
            n = rename_bound(n, fresh_);
            if (g.is(FKind::Neg))
                push(s, apply(s.subst, n));
            else
                branch(s, {apply(s.subst, n), g.right()});
        } catch (const NotNegatable& e) {
            inconclusive(e.what());
            return false;
        }
        return true;
    case FKind::Let: {
        std::map<std::string, Term> m;
        for (const auto& v : g.vars())
            m.emplace(v, fresh_.var());
        push(s, replace_vars(Formula::conj(g.left(), g.right()), m));
        return true;
    }
    case FKind::Call:
        return rule_call(s, g);
    case FKind::Atom:
        return handle(s, apply(s.subst, g.constraint()));
    }
    return false;
}

std::map<std::string, Sort> SolverEngine::sorts(const State& s) const
{
    std::map<std::string, Sort> m;
    std::vector<std::pair<std::string, std::string>> links;
    auto mark = [&](const Term& t, Sort so) {
        if (t.is_var()) {
            Sort& cur = m[t.name()];
            if (cur == Sort::Unknown)
                cur = so;
        }
    };
    std::function<void(const Term&)> walk_term = [&](const Term& t) {
        if (!t || t.is_ground())
            return;
        switch (t.kind()) {
        case TermKind::ExtSet:
            mark(t.tail(), Sort::Set);
            break;
        case TermKind::CP:
            mark(t.lhs(), Sort::Set);
            mark(t.rhs(), Sort::Set);
            break;
        case TermKind::Interval:
        case TermKind::Arith:
            mark(t.lhs(), Sort::Int);
            mark(t.rhs(), Sort::Int);
            break;
        default:
            break;
        }
        if (t.lhs())
            walk_term(t.lhs());
        if (t.rhs())
            walk_term(t.rhs());
    };
    std::function<void(const Formula&)> walk_formula;
    auto walk_constraint = [&](const Constraint& c) {
        for (const Term& t : c.args)
            walk_term(t);
        const auto& a = c.args;
        switch (c.kind) {
        case CKind::In:
        case CKind::Nin:
            mark(a[1], Sort::Set);
            break;
        case CKind::Eq:
        case CKind::Neq:
            for (int i = 0; i < 2; ++i) {
                const Term& o = a[1 - i];
                if (o.is_set_term())
                    mark(a[i], Sort::Set);
                else if (o.is(TermKind::Int) || o.is(TermKind::Arith))
                    mark(a[i], Sort::Int);
            }
            if (a[0].is_var() && a[1].is_var())
                links.emplace_back(a[0].name(), a[1].name());
            break;
        case CKind::Le:
        case CKind::Lt:
        case CKind::Is:
            mark(a[0], Sort::Int);
            mark(a[1], Sort::Int);
            break;
        case CKind::ApplyTo:
            mark(a[0], Sort::Set);
            break;
        case CKind::Foplus:
            mark(a[0], Sort::Set);
            mark(a[3], Sort::Set);
            break;
        case CKind::Foreach:
        case CKind::Exists:
            mark(c.q->domain, Sort::Set);
            walk_term(c.q->domain);
            walk_formula(c.q->func);
            walk_formula(c.q->body);
            break;
        default:
            for (const Term& t : a)
                mark(t, Sort::Set);
            break;
        }
    };
    walk_formula = [&](const Formula& f) {
        if (!f)
            return;
        switch (f.kind()) {
        case FKind::Atom:
            walk_constraint(f.constraint());
            break;
        case FKind::Call:
        case FKind::True:
        case FKind::False:
            break;
        default:
            walk_formula(f.left());
            walk_formula(f.right());
            break;
        }
    };
    for (const auto& c : s.store)
        walk_constraint(c);
    walk_formula(apply(s.subst, input_));
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& [x, y] : links) {
            Sort& sx = m[x];
            Sort& sy = m[y];
            if (sx == Sort::Unknown && sy != Sort::Unknown) {
                sx = sy;
                changed = true;
            } else if (sy == Sort::Unknown && sx != Sort::Unknown) {
                sy = sx;
                changed = true;
            }
        }
    }
    return m;
}

Term SolverEngine::fresh_atom(std::set<std::string>& used)
{
    for (std::size_t i = 1;; ++i) {
        std::string n = "n" + std::to_string(i);
        if (used.insert(n).second)
            return Term::atom(n);
    }
}

SolverEngine::Final SolverEngine::final_phase(State& s, Solution& out)
{
    auto so = sorts(s);
    auto sort_of = [&](const Term& t) {
        if (t.is_set_term())
            return Sort::Set;
        if (t.is(TermKind::Int) || t.is(TermKind::Arith))
            return Sort::Int;
        if (t.is_var()) {
            auto it = so.find(t.name());
            return it == so.end() ? Sort::Unknown : it->second;
        }
        return Sort::Unknown;
    };

    for (std::size_t i = 0; i < s.store.size(); ++i) {
        const Constraint& c = s.store[i];
        if (c.kind != CKind::Neq)
            continue;
        const Term a = c.args[0];
        const Term b = c.args[1];
        Sort sa = sort_of(a);
        Sort sb = sort_of(b);
        bool var_side_set = (a.is_var() && sa == Sort::Set) || (b.is_var() && sb == Sort::Set);
        bool other_ok = (sa == Sort::Set || a.is_var()) && (sb == Sort::Set || b.is_var());
        bool set_case = var_side_set && other_ok;
        bool int_case = !set_case && ((a.is_var() && sa == Sort::Int) || (b.is_var() && sb == Sort::Int)) &&
                        sa != Sort::Set && sb != Sort::Set && !(a.is(TermKind::Atom) || b.is(TermKind::Atom));
        if (!set_case && !int_case)
            continue;
        s.store.erase(s.store.begin() + static_cast<std::ptrdiff_t>(i));
        if (set_case)
            push(s, witness_neq(a, b));
        else
            branch(s, {Formula::atom(CKind::Lt, {a, b}), Formula::atom(CKind::Lt, {b, a})});
        return Final::Progress;
    }

    if (!s.domains_added) {
        // Typed set domains join once the rest is irreducible.
        s.domains_added = true;
        bool any = false;
        for (const auto& v : input_vars_) {
            auto it = opts_.set_domains.find(v);
            if (it == opts_.set_domains.end())
                continue;
            push(s, Formula::atom(CKind::Subset, {s.subst.apply(Term::var(v)), it->second}));
            any = true;
        }
        if (any)
            return Final::Progress;
    }

    for (const auto& v : input_vars_) {
        auto it = opts_.enum_domains.find(v);
        if (it == opts_.enum_domains.end() || it->second.empty())
            continue;
        Term cur = s.subst.apply(Term::var(v));
        if (!cur.is_var())
            continue;
        std::vector<Formula> alts;
        for (const Term& m : it->second)
            alts.push_back(Formula::atom(CKind::Eq, {cur, m}));
        branch(s, alts);
        return Final::Progress;
    }

    std::vector<LinConstraint> lin;
    std::vector<std::string> int_vars;
    for (const auto& c : s.store) {
        if (c.kind != CKind::Le && c.kind != CKind::Lt && c.kind != CKind::Is)
            continue;
        auto a = linearize(c.args[0]);
        auto b = linearize(c.args[1]);
        if (!a || !b)
            continue;
        lin.push_back(c.kind == CKind::Le ? make_le(*a, *b) : c.kind == CKind::Lt ? make_lt(*a, *b) : make_eq(*a, *b));
        std::vector<std::string> vs;
        c.args[0].collect_vars(vs);
        c.args[1].collect_vars(vs);
        for (const auto& v : vs)
            if (std::find(int_vars.begin(), int_vars.end(), v) == int_vars.end())
                int_vars.push_back(v);
    }
    if (!lin.empty()) {
        ArithLimits lim;
        lim.branch_depth = opts_.arith_branch_depth;
        ArithResult r = solve_linear(lin, int_vars, lim);
        if (r.status == ArithStatus::Unsat) {
            if (s.committed)
                inconclusive("no model found for the solved form");
            return Final::Fail;
        }
        if (r.status == ArithStatus::Unknown) {
            inconclusive("integer arithmetic undecided");
            return Final::Fail;
        }
        s.committed = true;
        for (const auto& v : int_vars)
            if (!bind(s, v, Term::integer(r.model.at(v))))
                return Final::Fail;
        return Final::Progress;
    }

    // Minimal model for whatever is still unbound.
    s.committed = true;
    out.residual.clear();
    for (const auto& c : s.store)
        if (std::find(out.residual.begin(), out.residual.end(), c) == out.residual.end())
            out.residual.push_back(c);
    std::set<std::string> used;
    collect_atoms(input_, used);
    for (const auto& [v, t] : s.subst.bindings())
        collect_atoms(t, used);
    std::vector<std::string> open_vars;
    for (const auto& v : input_vars_)
        s.subst.apply(Term::var(v)).collect_vars(open_vars);
    for (const auto& c : s.store)
        free_vars(c, open_vars);
    for (const auto& v : open_vars) {
        if (s.subst.binds(v))
            continue;
        Sort srt = so.count(v) ? so.at(v) : Sort::Unknown;
        Term val = srt == Sort::Set ? Term::empty() : srt == Sort::Int ? Term::integer(0) : fresh_atom(used);
        s.subst.bind(v, val);
    }
    Env env;
    for (const auto& v : input_vars_) {
        Term t = s.subst.apply(Term::var(v));
        out.bindings.bind(v, t);
        env.emplace(v, t);
    }
    Truth t = evaluate(input_, env, opts_.program);
    if (t == Truth::True)
        return Final::Done;
    inconclusive("no model found for the solved form");
    return Final::Fail;
}

SolutionStream::SolutionStream(const Formula& f, SolveOptions opts)
    : engine_(std::make_unique<SolverEngine>(f, std::move(opts)))
{
}

SolutionStream::~SolutionStream() = default;
SolutionStream::SolutionStream(SolutionStream&&) noexcept = default;
SolutionStream& SolutionStream::operator=(SolutionStream&&) noexcept = default;

std::optional<Solution> SolutionStream::next() { return engine_->next(); }
SolveStatus SolutionStream::exhausted_status() const { return engine_->exhausted_status(); }
const std::string& SolutionStream::reason() const { return engine_->reason(); }
std::size_t SolutionStream::steps() const { return engine_->steps(); }

SolveResult solve(const Formula& f, const SolveOptions& opts, std::size_t max_solutions)
{
    SolveResult r;
    SolutionStream stream(f, opts);
    while (r.solutions.size() < max_solutions) {
        auto sol = stream.next();
        if (!sol)
            break;
        r.solutions.push_back(std::move(*sol));
    }
    r.status = r.solutions.empty() ? stream.exhausted_status() : SolveStatus::Sat;
    r.reason = stream.reason();
    r.steps = stream.steps();
    return r;
}

ProofResult prove(const Formula& f, const SolveOptions& opts)
{
    ProofResult out;
    Formula neg;
    try {
        FreshGen g("T");
        neg = negate(f, opts.program, g);
    } catch (const NotNegatable& e) {
        out.reason = e.what();
        return out;
    }
    SolveResult r = solve(neg, opts, 1);
    out.steps = r.steps;
    out.reason = r.reason;
    switch (r.status) {
    case SolveStatus::Unsat:
        out.status = ProofStatus::Proved;
        break;
    case SolveStatus::Sat: {
        out.status = ProofStatus::Disproved;
        std::vector<std::string> vars;
        free_vars(f, vars);
        Solution cex;
        cex.residual = r.solutions[0].residual;
        cex.bindings = r.solutions[0].bindings.restrict(vars);
        out.counterexample = std::move(cex);
        break;
    }
    case SolveStatus::Unknown:
        break;
    }
    return out;
}

}  // namespace setsolve
