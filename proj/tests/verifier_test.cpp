#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "setsolve/corpus.hpp"
#include "setsolve/eval.hpp"
#include "setsolve/verifier.hpp"

using namespace setsolve;

namespace {

const std::string kCorpus = SETSOLVE_CORPUS_DIR;

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const DischargeReport& report(const std::vector<DischargeReport>& rs, const std::string& id)
{
    auto it = std::find_if(rs.begin(), rs.end(), [&](const DischargeReport& r) { return r.po_id == id; });
    REQUIRE_MESSAGE(it != rs.end(), id);
    return *it;
}

std::vector<std::string> free_of(const Formula& f)
{
    std::vector<std::string> out;
    free_vars(f, out);
    return out;
}

bool has(const std::vector<std::string>& v, const std::string& x)
{
    return std::find(v.begin(), v.end(), x) != v.end();
}

const char* kTwoVars = R"(
machine Two
context C
  type col = etype([red,green])
  set Cols : col
end
variables
  f : rel(col, col)
  k : int
end
invariants
  typ: pfun(f) & dom(f, Cols)
  nonneg: 0 =< k
end
init
  a1: f := cp(Cols, {red})
  a2: k := 0
end
event bump
  then
    a: k := k + 1
end
event paint
  any c : col
  where
    g: c in Cols
  then
    a: f(c) := green
end
)";

}  // namespace

TEST_CASE("gears obligations")
{
    Machine m = load_machine(kCorpus + "/gears.smch");
    auto pos = generate_pos(m);
    REQUIRE(pos.size() == 5);
    std::vector<std::string> ids;
    for (const auto& po : pos)
        ids.push_back(po.id);
    CHECK(ids == std::vector<std::string>{"INITIALISATION/inv1/INIT", "make_GearExtended/grd1/WD",
                                          "make_GearExtended/inv1/INV", "start_GearRetract/grd1/WD",
                                          "start_GearRetract/inv1/INV"});
    auto s = summarize(verify(m));
    CHECK(s.init == 1);
    CHECK(s.wd == 2);
    CHECK(s.inv == 2);
    CHECK(s.proved == 5);
}

TEST_CASE("an event only gets obligations for invariants it can break")
{
    Machine m = parse_machine(kTwoVars);
    auto pos = generate_pos(m);
    std::vector<std::string> ids;
    for (const auto& po : pos)
        ids.push_back(po.id);
    CHECK(has(ids, "bump/nonneg/INV"));
    CHECK_FALSE(has(ids, "bump/typ/INV"));
    CHECK(has(ids, "paint/typ/INV"));
    CHECK_FALSE(has(ids, "paint/nonneg/INV"));
    auto s = summarize(verify(m));
    CHECK(s.proved == s.pos);
}

TEST_CASE("preservation goal primes only written variables")
{
    Machine m = load_machine(kCorpus + "/doors.smch");
    for (const auto& po : generate_pos(m)) {
        if (po.id != "start_GearExtend/inv2/INV")
            continue;
        auto vars = free_of(po.goal);
        CHECK(has(vars, "Gear_ret_p_"));
        CHECK(has(vars, "Gear_ext_p"));
        CHECK(has(vars, "Door_open_p"));
        CHECK_FALSE(has(vars, "Gear_ext_p_"));
        CHECK_FALSE(has(vars, "Door_open_p_"));
        CHECK_FALSE(has(vars, "Gear_ret_p"));
        return;
    }
    FAIL("obligation missing");
}

TEST_CASE("strict well-definedness asks for a whole function")
{
    Machine m = load_machine(kCorpus + "/gears.smch");
    auto weak = generate_pos(m, false);
    auto strict = generate_pos(m, true);
    REQUIRE(weak.size() == strict.size());
    CHECK(to_string(weak[1].goal) != to_string(strict[1].goal));
    VerifyOptions o;
    o.strict_wd = true;
    CHECK(summarize(verify(m, o)).proved == 5);
}

TEST_CASE("clearing the function breaks the invariant")
{
    Machine m = load_machine(kCorpus + "/mutations/m05_event_clears_function.smch");
    auto rs = verify(m);
    const auto& r = report(rs, "start_GearRetract/inv1/INV");
    CHECK(r.status == ProofStatus::Disproved);
    REQUIRE(r.counterexample);
    CHECK(r.counterexample_checked);
}

TEST_CASE("proved obligations stay proved with more hypotheses")
{
    for (const char* file : {"gears.smch", "doors.smch", "gears_intermediate.smch"}) {
        Machine m = load_machine(kCorpus + "/" + file);
        for (const auto& po : generate_pos(m)) {
            VerifyOptions few;
            few.auto_hyp = true;
            if (discharge(po, few).status != ProofStatus::Proved)
                continue;
            VerifyOptions all;
            std::vector<std::string> labels;
            for (const auto& h : po.pool)
                labels.push_back(h.label);
            all.hypotheses = labels;
            CHECK_MESSAGE(discharge(po, all).status == ProofStatus::Proved, po.id);
        }
    }
}

TEST_CASE("automatic hypothesis selection")
{
    Machine m = load_machine(kCorpus + "/doors.smch");
    VerifyOptions o;
    o.auto_hyp = true;
    auto rs = verify(m, o);
    const auto& r = report(rs, "start_GearExtend/inv2/INV");
    CHECK(r.status == ProofStatus::Proved);
    CHECK(r.hypotheses_used.size() <= 1);
    const auto& wd = report(rs, "start_GearExtend/grd1/WD");
    CHECK(wd.status == ProofStatus::Proved);
    CHECK(wd.hypotheses_used == std::vector<std::string>{"typ_ret"});
    CHECK(wd.iterations == 2);
}

TEST_CASE("dropping a needed hypothesis loses the proof")
{
    std::string src = slurp(kCorpus + "/gears.smch") + "\nannotate make_GearExtended/grd1/WD drop(inv1)\n";
    auto rs = verify(parse_machine(src));
    const auto& r = report(rs, "make_GearExtended/grd1/WD");
    CHECK(r.status == ProofStatus::Disproved);
    CHECK(r.counterexample_checked);
}

TEST_CASE("parallel discharge gives the same reports")
{
    Machine m = load_machine(kCorpus + "/doors.smch");
    VerifyOptions one, four;
    four.jobs = 4;
    auto a = verify(m, one);
    auto b = verify(m, four);
    REQUIRE(a.size() == b.size());
    for (std::size_t n = 0; n < a.size(); ++n) {
        CHECK(a[n].po_id == b[n].po_id);
        CHECK(a[n].status == b[n].status);
        CHECK(a[n].hypotheses_used == b[n].hypotheses_used);
    }
}

TEST_CASE("json report")
{
    auto rs = verify(load_machine(kCorpus + "/mutations/m04_init_empty.smch"));
    auto j = nlohmann::json::parse(report_json(rs));
    REQUIRE(j.is_array());
    CHECK(j.size() == rs.size());
    for (const auto& e : j) {
        CHECK(e.contains("po_id"));
        CHECK(e.contains("kind"));
        CHECK(e.contains("status"));
        CHECK(e["iterations"].get<int>() >= 1);
        if (e["status"] == "Disproved")
            CHECK(e["counterexample_checked"].get<bool>());
    }
}

TEST_CASE("summary table")
{
    VerifySummary s;
    s.pos = 5;
    s.init = 1;
    s.wd = 2;
    s.inv = 2;
    s.proved = 5;
    std::string t = summary_table("Gears", s);
    CHECK(t.find("Machine") == 0);
    CHECK(t.find("Gears") != std::string::npos);
    CHECK(t.find("time") == std::string::npos);
    CHECK(summary_table("Gears", s, true).find("time") != std::string::npos);
}

TEST_CASE("corpus files load and match the manifest")
{
    auto cases = load_corpus(kCorpus);
    REQUIRE(cases.size() == 4);
    for (const auto& c : cases) {
        if (!c.machine)
            continue;
        Machine m = load_machine(c.path);
        VerifyOptions o;
        o.auto_hyp = true;
        auto s = summarize(verify(m, o));
        if (c.expected.count("pos"))
            CHECK_MESSAGE(std::to_string(s.pos) == c.expected.at("pos").value, c.file);
        if (c.expected.count("proved"))
            CHECK_MESSAGE(std::to_string(s.proved) == c.expected.at("proved").value, c.file);
        if (c.expected.count("init"))
            CHECK(std::to_string(s.init) == c.expected.at("init").value);
        for (const auto& [key, entry] : c.expected)
            CHECK_MESSAGE(!entry.origin.empty(), c.file << " " << key);
        CHECK_MESSAGE(c.golden.count("verify"), c.file);
        CHECK(c.golden.at("verify").find(summary_table(m.name, s).substr(0, 7)) != std::string::npos);
    }
    auto slog = std::find_if(cases.begin(), cases.end(), [](const CorpusCase& c) { return !c.machine; });
    REQUIRE(slog != cases.end());
    CHECK(slog->golden.count("solve"));
}

TEST_CASE("every mutation flips its obligation")
{
    auto manifest = parse_manifest(slurp(kCorpus + "/mutations/manifest.txt"));
    REQUIRE(manifest.size() == 10);
    for (const auto& [name, entry] : manifest) {
        auto bar = entry.origin.find(" | ");
        std::string po = entry.origin.substr(0, bar);
        Machine base = load_machine(kCorpus + "/" + entry.value);
        Machine mutant = load_machine(kCorpus + "/mutations/" + name + ".smch");
        CHECK(typecheck_machine(mutant).empty());
        VerifyOptions o;
        o.auto_hyp = true;
        CHECK_MESSAGE(report(verify(base, o), po).status == ProofStatus::Proved, name);
        const auto& r = report(verify(mutant, o), po);
        CHECK_MESSAGE(r.status == ProofStatus::Disproved, name);
        CHECK_MESSAGE(r.counterexample_checked, name);
    }
}

TEST_CASE("empty trace yields the initial state")
{
    Machine m = load_machine(kCorpus + "/gears.smch");
    auto r = animate(m, {});
    REQUIRE(r.states.size() == 1);
    CHECK(r.states[0].at("Gear_ext_p") == parse_term("{[front,true],[right,true],[left,true]}"));
}

TEST_CASE("animation steps keep invariants and frame")
{
    Machine m = load_machine(kCorpus + "/doors.smch");
    auto trace = parse_trace(m, "start_GearExtend po = front\nstart_GearExtend po = left\n");
    auto start = parse_bindings(m, slurp(kCorpus + "/traces/doors_all_true.state"));
    auto r = animate(m, trace, {}, start);
    REQUIRE(r.states.size() == 3);
    CHECK(r.states[2].at("Gear_ret_p") == parse_term("{[front,false],[left,false],[right,true]}"));
    Env consts{{"PositionsDG", parse_term("{front,right,left}")}};
    for (std::size_t n = 1; n < r.states.size(); ++n) {
        // Only gear_ret_p is written.
        CHECK(r.states[n].at("Gear_ext_p") == r.states[n - 1].at("Gear_ext_p"));
        CHECK(r.states[n].at("Door_open_p") == r.states[n - 1].at("Door_open_p"));
        Env env = consts;
        env.insert(r.states[n].begin(), r.states[n].end());
        FreshGen fresh("M");
        for (const auto& inv : m.invariants)
            CHECK_MESSAGE(evaluate(desugar_formula(inv.formula, fresh), env) == Truth::True, inv.label);
    }
}

TEST_CASE("blocked guard reports the failing step")
{
    Machine m = load_machine(kCorpus + "/gears.smch");
    auto trace = parse_trace(m, slurp(kCorpus + "/traces/gears_blocked.trace"));
    try {
        animate(m, trace);
        FAIL("expected GuardFailed");
    } catch (const GuardFailed& g) {
        CHECK(g.event == "make_GearExtended");
        CHECK(g.step == 3);
        CHECK(g.states.size() == 3);
    }
}

TEST_CASE("traces must name known events and parameters")
{
    Machine m = load_machine(kCorpus + "/gears.smch");
    CHECK_THROWS(parse_trace(m, "fly po = front\n"));
    CHECK_THROWS(parse_trace(m, "make_GearExtended wheel = front\n"));
}
