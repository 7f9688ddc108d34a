#include <doctest.h>

#include <filesystem>

#include "setsolve/eval.hpp"
#include "setsolve/machine.hpp"

using namespace setsolve;

namespace {

const std::string kCorpus = SETSOLVE_CORPUS_DIR;

const char* kMinimal = R"(
machine Counter
variables
  n : int
end
invariants
  pos: 0 =< n
end
init
  a: n := 0
end
)";

std::string with_body(const std::string& body)
{
    return R"(
machine M
context C
  type col = etype([red,green])
  set Cols : col
end
variables
  f : rel(col, int)
  k : int
end
invariants
  typ: pfun(f) & dom(f, Cols)
end
init
  a1: f := cp(Cols, {0})
  a2: k := 0
end
)" + body;
}

}  // namespace

TEST_CASE("gears machine structure")
{
    Machine m = load_machine(kCorpus + "/gears.smch");
    CHECK(m.name == "Gears");
    CHECK(m.context == "PositionsDoorsGears");
    REQUIRE(m.variables.size() == 1);
    CHECK(m.variables[0].var == "Gear_ext_p");
    CHECK(m.invariants.size() == 1);
    CHECK(m.init.size() == 1);
    REQUIRE(m.events.size() == 2);
    CHECK(m.events[0].name == "make_GearExtended");
    REQUIRE(m.events[0].actions.size() == 1);
    CHECK(m.events[0].actions[0].index.has_value());
    CHECK(m.event("start_GearRetract") != nullptr);
    CHECK(m.event("nope") == nullptr);
    REQUIRE(m.constants.size() == 1);
    CHECK(m.carrier(m.constants[0]) == parse_term("{front,right,left}"));
}

TEST_CASE("a machine without events is valid")
{
    Machine m = parse_machine(kMinimal);
    CHECK(m.events.empty());
    CHECK(m.variables.size() == 1);
    CHECK(typecheck_machine(m).empty());
}

TEST_CASE("machine errors")
{
    CHECK_THROWS(parse_machine(with_body("event e then a: g := 1 end\n")));
    CHECK_THROWS(parse_machine(with_body("event e then a: k := 1\n a: k := 2 end\n")));
    CHECK_THROWS(parse_machine(with_body("event e then a: k := 1 end\nevent e then a: k := 2 end\n")));
    CHECK_THROWS(parse_machine("machine M\nvariables\n  x_ : int\nend\n"));
    CHECK_THROWS(parse_machine("machine M\nvariables\n  x : int\n"));
    try {
        parse_machine(with_body("event e\n  where\n    g: k in\nend\n"));
        FAIL("expected an error");
    } catch (const ParseError& e) {
        CHECK(e.span.line > 1);
    }
}

TEST_CASE("machine type errors")
{
    CHECK(typecheck_machine(parse_machine(with_body("event e then a: k := red end\n"))).size() == 1);
    CHECK(typecheck_machine(parse_machine(with_body("event e any c : col then a: f(c) := green end\n"))).size() ==
          1);
    CHECK(typecheck_machine(parse_machine(with_body("event e any c : col then a: f(c) := k + 1 end\n"))).empty());
}

TEST_CASE("printing is stable under reparsing")
{
    std::vector<std::string> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(kCorpus))
        if (e.path().extension() == ".smch")
            files.push_back(e.path().string());
    REQUIRE(files.size() >= 13);
    for (const auto& path : files) {
        Machine m = load_machine(path);
        std::string once = to_string(m);
        Machine again = parse_machine(once);
        CHECK_MESSAGE(to_string(again) == once, path);
        CHECK(again.invariants.size() == m.invariants.size());
        CHECK(again.events.size() == m.events.size());
    }
}

TEST_CASE("function application desugars to applyTo")
{
    FreshGen fresh("M");
    Formula f = desugar_formula(parse_machine_formula("applyTo(F,X,Y) & F(X) = true"), fresh);
    CHECK(to_string(f) == "applyTo(F,X,Y) & applyTo(F,X,true)");
}

TEST_CASE("nested application is lifted into a definition")
{
    FreshGen fresh("M");
    Formula f = desugar_formula(parse_machine_formula("G(F(X)) = Y"), fresh);
    CHECK(to_string(f) == "let([_M0,_M1], applyTo(F,X,_M0) & applyTo(G,_M0,_M1), _M1 = Y)");
}

TEST_CASE("arithmetic over applications")
{
    // deadline(t) := ct + 12 style update: the value becomes an `is` definition.
    Machine m = parse_machine(with_body("event tick any c : col then a: f(c) := k + 12 end\n"));
    FreshGen fresh("M");
    Formula f = desugar_action(m.events[0].actions[0], false, fresh);
    CHECK(to_string(f) == "let([_M0], _M0 is K + 12, foplus(F,C,_M0,F_))");

    FreshGen g("M");
    Formula h = desugar_formula(parse_machine_formula("K = F(C) + 1"), g);
    CHECK(to_string(h) == "let([_M0], applyTo(F,C,_M0), K is _M0 + 1)");
}

TEST_CASE("actions become next-state constraints")
{
    Machine m = load_machine(kCorpus + "/gears.smch");
    FreshGen fresh("M");
    CHECK(to_string(desugar_action(m.init[0], true, fresh)) == "Gear_ext_p = cp(PositionsDG,{true})");
    CHECK(to_string(desugar_action(m.events[0].actions[0], false, fresh)) ==
          "foplus(Gear_ext_p,Po,true,Gear_ext_p_)");
    Machine w = parse_machine(with_body("event e then a: k := k + 1 end\n"));
    CHECK(to_string(desugar_action(w.events[0].actions[0], false, fresh)) == "K_ is K + 1");
    CHECK_THROWS(desugar_action(m.events[0].actions[0], true, fresh));
}

TEST_CASE("desugaring preserves meaning")
{
    // Application is defined only where the relation is functional.
    struct Case {
        const char* formula;
        const char* env;
        bool expected;
    };
    const Case cases[] = {
        {"F(X) = true", "F = {[a,true],[b,false]}, X = a", true},
        {"F(X) = true", "F = {[a,true],[b,false]}, X = b", false},
        {"F(X) = true", "F = {[a,true],[a,false]}, X = a", false},
        {"F(X) = true", "F = {[b,true]}, X = a", false},
        {"G(F(X)) = 2", "F = {[a,1]}, G = {[1,2]}, X = a", true},
        {"N = F(X) + 1", "F = {[a,1]}, X = a, N = 2", true},
        {"N = F(X) + 1", "F = {[a,1]}, X = a, N = 3", false},
        {"F(X) in S", "F = {[a,1]}, X = a, S = {1,2}", true},
        {"F(X) in S", "F = {[a,3]}, X = a, S = {1,2}", false},
    };
    for (const auto& c : cases) {
        Env env;
        std::string rest = c.env;
        for (std::size_t at = 0; at < rest.size();) {
            // name = term, ... with commas inside braces
            auto eq = rest.find(" = ", at);
            std::string name = rest.substr(at, eq - at);
            int depth = 0;
            std::size_t end = eq + 3;
            for (; end < rest.size(); ++end) {
                char ch = rest[end];
                depth += (ch == '{' || ch == '[') - (ch == '}' || ch == ']');
                if (ch == ',' && depth == 0)
                    break;
            }
            env[name] = parse_term(rest.substr(eq + 3, end - eq - 3));
            at = end + 2;
        }
        FreshGen fresh("M");
        Formula sugared = parse_machine_formula(c.formula);
        Formula plain = desugar_formula(sugared, fresh);
        CHECK_MESSAGE(evaluate(plain, env) == (c.expected ? Truth::True : Truth::False), c.formula << " with " << c.env);
        // Sugar-free formulas are left alone.
        CHECK(to_string(desugar_formula(plain, fresh)) == to_string(plain));
    }
}
