#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <random>
#include <set>
#include <thread>

#include "ctxbundle/presets.hpp"
#include "ctxbundle/solver.hpp"
#include "support/random_models.hpp"

using namespace ctxbundle;

namespace {

SupportModel preset_support(const std::string& name) {
  return support_of(make_preset(name).model);
}

GlobalAssignment ga(std::initializer_list<std::pair<const std::string, int>> il) {
  return GlobalAssignment{std::map<std::string, int>(il)};
}

/// Oracle-side extendability: some enumerated global section restricts to the
/// given tuple on the given context.
bool oracle_extends(const std::vector<GlobalAssignment>& oracle, const Scenario& s,
                    const std::string& ctx_name, const OutcomeTuple& tuple) {
  const Context& ctx = s.context(ctx_name);
  for (const auto& g : oracle) {
    bool match = true;
    for (std::size_t k = 0; k < ctx.observables.size(); ++k)
      if (g.assignment.at(ctx.observables[k]) != tuple[k]) match = false;
    if (match) return true;
  }
  return false;
}

Level oracle_level(const SupportModel& sm, const std::vector<GlobalAssignment>& oracle) {
  if (oracle.empty()) return Level::strongly_contextual;
  for (const auto& ctx : sm.scenario.contexts)
    for (const auto& tuple : sm.support.at(ctx.name))
      if (!oracle_extends(oracle, sm.scenario, ctx.name, tuple))
        return Level::logically_contextual;
  return Level::noncontextual;
}

/// No observable receives two different values along any root-to-leaf path
/// (agreeing revisits aside), counting only live assignments.
void check_path_consistency(const SearchTrace& tr, std::size_t node,
                            std::map<std::string, int> seen) {
  const auto& n = tr.nodes[node];
  if (n.kind == SearchTrace::NodeKind::assign && n.marker != -1) {
    auto it = seen.find(n.observable);
    if (it != seen.end()) REQUIRE(it->second == n.value);
    seen[n.observable] = n.value;
  }
  for (std::size_t c : n.children) check_path_consistency(tr, c, seen);
}

}  // namespace

TEST_CASE("is_global_section checks every context") {
  SupportModel bell = preset_support("bell");
  REQUIRE(is_global_section(bell, ga({{"X_A", 1}, {"X_B", 1}, {"Z_A", 0}, {"Z_B", 0}})));
  REQUIRE_FALSE(is_global_section(bell, ga({{"X_A", 1}, {"X_B", 0}, {"Z_A", 0}, {"Z_B", 0}})));
  REQUIRE_THROWS_AS(is_global_section(bell, ga({{"X_A", 1}})), std::invalid_argument);
  REQUIRE_THROWS_AS(
      is_global_section(bell, ga({{"X_A", 2}, {"X_B", 0}, {"Z_A", 0}, {"Z_B", 0}})),
      std::invalid_argument);

  // full supports accept everything
  SupportModel full = bell;
  for (auto& [ctx, supp] : full.support)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) supp.insert(OutcomeTuple{a, b});
  REQUIRE(is_global_section(full, ga({{"X_A", 1}, {"X_B", 0}, {"Z_A", 1}, {"Z_B", 0}})));
}

TEST_CASE("the oracle counts global sections") {
  REQUIRE(enumerate_global_sections(preset_support("bell")).size() == 4);
  REQUIRE(enumerate_global_sections(preset_support("pr-box")).empty());
  REQUIRE(enumerate_global_sections(preset_support("ghz-ab")).empty());
  REQUIRE(enumerate_global_sections(preset_support("cluster-ring-5")).size() == 32);
}

TEST_CASE("extension succeeds on the bell model") {
  SupportModel bell = preset_support("bell");
  Section seed = section_of(bell.scenario, "C1", {1, 1});
  ExtendOutcome out = extend_section(bell, seed, true);
  REQUIRE(out.extension.has_value());
  REQUIRE(is_global_section(bell, *out.extension));
  // the two oracle extensions of C1:11 are the z=0 and z=1 diagonals
  REQUIRE((out.extension->assignment.at("Z_A") == out.extension->assignment.at("Z_B")));

  // success leaves a single explored path: one facet per context, no clashes
  REQUIRE(out.trace->count(SearchTrace::NodeKind::facet) == 4);
  REQUIRE(out.trace->count(SearchTrace::NodeKind::success) == 1);
  for (const auto& n : out.trace->nodes) REQUIRE(n.marker != -1);
}

TEST_CASE("extension fails from both ghz seed triangles") {
  SupportModel ghz = preset_support("ghz-ab");
  for (OutcomeTuple seed_tuple : {OutcomeTuple{1, 1, 1}, OutcomeTuple{1, 0, 0}}) {
    Section seed = section_of(ghz.scenario, "C1", seed_tuple);
    ExtendOutcome out = extend_section(ghz, seed, true);
    INFO("seed C1:" << tuple_to_digits(seed_tuple));
    REQUIRE_FALSE(out.extension.has_value());
    REQUIRE(out.trace.has_value());
    REQUIRE(trace_is_fully_contradicted(*out.trace));
    REQUIRE(out.trace->root().context == "C1");
    REQUIRE(out.trace->root().tuple == seed_tuple);
    check_path_consistency(*out.trace, 0, {});
  }
}

TEST_CASE("the teal cluster seed extends to the all-zero section") {
  SupportModel cluster = preset_support("cluster-ring-5");
  Section seed = section_of(cluster.scenario, "C2", {0, 0, 0});
  ExtendOutcome out = extend_section(cluster, seed, false);
  REQUIRE(out.extension.has_value());
  REQUIRE(is_global_section(cluster, *out.extension));
}

TEST_CASE("seed preconditions are enforced") {
  SupportModel ghz = preset_support("ghz-ab");
  REQUIRE_THROWS_WITH(extend_section(ghz, section_of(ghz.scenario, "C1", {0, 0, 0})),
                      Catch::Matchers::ContainsSubstring("not in the support"));
  Section not_a_context;
  not_a_context.assignment = {{"X_A", 0}, {"Y_A", 0}};
  REQUIRE_THROWS_WITH(extend_section(ghz, not_a_context),
                      Catch::Matchers::ContainsSubstring("does not match any context"));
}

TEST_CASE("a singleton support yields a one-facet trace") {
  Scenario s;
  s.observables = {{"a", 2, {}}, {"b", 2, {}}};
  s.contexts = {{"C", {"a", "b"}}};
  SupportModel sm;
  sm.scenario = s;
  sm.support["C"] = {OutcomeTuple{1, 0}};
  ExtendOutcome out = extend_section(sm, section_of(s, "C", {1, 0}), true);
  REQUIRE(out.extension.has_value());
  REQUIRE(out.trace->count(SearchTrace::NodeKind::facet) == 1);
  REQUIRE(out.trace->count(SearchTrace::NodeKind::success) == 1);
}

TEST_CASE("a support hole leaves an exhausted marker") {
  // C2 offers no tuple with b=1, so the branch dies before any facet is tried.
  Scenario s;
  s.observables = {{"a", 2, {}}, {"b", 2, {}}, {"c", 2, {}}};
  s.contexts = {{"C1", {"a", "b"}}, {"C2", {"b", "c"}}};
  SupportModel sm;
  sm.scenario = s;
  sm.support["C1"] = {OutcomeTuple{1, 1}};
  sm.support["C2"] = {OutcomeTuple{0, 0}};
  ExtendOutcome out = extend_section(sm, section_of(s, "C1", {1, 1}), true);
  REQUIRE_FALSE(out.extension.has_value());
  REQUIRE(out.trace->count(SearchTrace::NodeKind::exhausted) == 1);
  REQUIRE(trace_is_fully_contradicted(*out.trace));
}

TEST_CASE("parity systems of the preset models") {
  SECTION("ghz rows read 1,1,1,0") {
    auto ps = build_parity_system(preset_support("ghz-ab"));
    REQUIRE(ps.has_value());
    REQUIRE(ps->variables.size() == 6);
    REQUIRE(ps->rows.size() == 4);
    std::vector<int> rhs;
    for (const auto& r : ps->rows) rhs.push_back(r.rhs);
    REQUIRE(rhs == std::vector<int>{1, 1, 1, 0});
    // each row covers its three context observables
    for (const auto& r : ps->rows) REQUIRE(std::popcount(r.mask) == 3);
  }
  SECTION("pr-box rows read 0,0,0,1") {
    auto ps = build_parity_system(preset_support("pr-box"));
    REQUIRE(ps.has_value());
    std::vector<int> rhs;
    for (const auto& r : ps->rows) rhs.push_back(r.rhs);
    REQUIRE(rhs == std::vector<int>{0, 0, 0, 1});
  }
  SECTION("bell contributes rows only for the correlated contexts") {
    auto ps = build_parity_system(preset_support("bell"));
    REQUIRE(ps.has_value());
    REQUIRE(ps->rows.size() == 2);
    REQUIRE(ps->rows[0].context == "C1");
    REQUIRE(ps->rows[1].context == "C4");
    REQUIRE((ps->rows[0].rhs == 0 && ps->rows[1].rhs == 0));
  }
  SECTION("a mixed support is not a parity model") {
    SupportModel bell = preset_support("bell");
    bell.support["C1"].insert(OutcomeTuple{0, 1});  // three of four tuples
    REQUIRE_FALSE(build_parity_system(bell).has_value());
  }
}

TEST_CASE("parity obstruction finds the four-row contradiction") {
  for (const char* name : {"ghz-ab", "pr-box"}) {
    auto ps = build_parity_system(preset_support(name));
    REQUIRE(ps.has_value());
    ParityOutcome po = parity_obstruction(*ps);
    INFO(name);
    REQUIRE_FALSE(po.consistent);
    REQUIRE(po.contradiction_rows == std::vector<std::string>{"C1", "C2", "C3", "C4"});
    REQUIRE(verify_parity_contradiction(*ps, po.contradiction_rows));
  }
}

TEST_CASE("the homogeneous cluster system is consistent") {
  SupportModel cluster = preset_support("cluster-ring-5");
  auto ps = build_parity_system(cluster);
  REQUIRE(ps.has_value());
  REQUIRE(ps->rows.size() == 10);
  ParityOutcome po = parity_obstruction(*ps);
  REQUIRE(po.consistent);
  for (const auto& [id, v] : po.solution) REQUIRE(v == 0);
  REQUIRE(is_global_section(cluster, GlobalAssignment{po.solution}));
}

TEST_CASE("classification of the four presets") {
  Classification bell = classify(preset_support("bell"));
  REQUIRE(bell.level == Level::noncontextual);
  REQUIRE(bell.extensions.size() == 12);  // 2 + 4 + 4 + 2 supported sections

  Classification ghz = classify(preset_support("ghz-ab"));
  REQUIRE(ghz.level == Level::strongly_contextual);
  REQUIRE(ghz.parity_rows == std::vector<std::string>{"C1", "C2", "C3", "C4"});

  Classification pr = classify(preset_support("pr-box"));
  REQUIRE(pr.level == Level::strongly_contextual);
  REQUIRE_FALSE(pr.parity_rows.empty());

  Classification cluster = classify(preset_support("cluster-ring-5"));
  REQUIRE(cluster.level == Level::noncontextual);
  REQUIRE(cluster.extensions.size() == 4 * 5 + 8 * 5);
}

TEST_CASE("a parity-consistent model can still be logically contextual") {
  // C2 and C3 force a = b, so the even-parity tuple a=0,b=1,c=1 of C1 has no
  // extension even though the parity system is solvable.
  Scenario s;
  s.observables = {{"a", 2, {}}, {"b", 2, {}}, {"c", 2, {}}, {"d", 2, {}}};
  s.contexts = {{"C1", {"a", "b", "c"}}, {"C2", {"a", "d"}}, {"C3", {"b", "d"}}};
  SupportModel sm;
  sm.scenario = s;
  sm.support["C1"] = {OutcomeTuple{0, 0, 0}, OutcomeTuple{0, 1, 1}, OutcomeTuple{1, 0, 1},
                      OutcomeTuple{1, 1, 0}};
  sm.support["C2"] = {OutcomeTuple{0, 0}, OutcomeTuple{1, 1}};
  sm.support["C3"] = {OutcomeTuple{0, 0}, OutcomeTuple{1, 1}};

  auto ps = build_parity_system(sm);
  REQUIRE(ps.has_value());
  REQUIRE(parity_obstruction(*ps).consistent);

  Classification c = classify(sm);
  REQUIRE(c.level == Level::logically_contextual);
  REQUIRE(c.non_extendable.has_value());
  REQUIRE_FALSE(extend_section(sm, section_of(s, c.non_extendable->context,
                                              c.non_extendable->tuple))
                    .extension.has_value());
}

TEST_CASE("solver agrees with the oracle on random models") {
  std::mt19937 rng(424242);
  int parity_models = 0;
  for (int round = 0; round < 100; ++round) {
    SupportModel sm = testsupport::random_support_model(rng);
    std::vector<GlobalAssignment> oracle = enumerate_global_sections(sm);

    for (const auto& ctx : sm.scenario.contexts) {
      for (const auto& tuple : sm.support.at(ctx.name)) {
        bool solver_ok =
            extend_section(sm, section_of(sm.scenario, ctx.name, tuple)).extension.has_value();
        bool oracle_ok = oracle_extends(oracle, sm.scenario, ctx.name, tuple);
        INFO("round " << round << " context " << ctx.name << " tuple "
                      << tuple_to_digits(tuple));
        REQUIRE(solver_ok == oracle_ok);
      }
    }

    REQUIRE(classify(sm).level == oracle_level(sm, oracle));

    if (auto ps = build_parity_system(sm)) {
      ++parity_models;
      ParityOutcome po = parity_obstruction(*ps);
      REQUIRE(po.consistent == !oracle.empty());
      if (po.consistent) REQUIRE(is_global_section(sm, GlobalAssignment{po.solution}));
    }
  }
  INFO("parity models among the random sample: " << parity_models);
}

TEST_CASE("parity verdicts match the oracle on generated parity models") {
  std::mt19937 rng(777);
  for (int round = 0; round < 100; ++round) {
    SupportModel sm = testsupport::random_parity_model(rng);
    auto ps = build_parity_system(sm);
    REQUIRE(ps.has_value());
    ParityOutcome po = parity_obstruction(*ps);
    std::vector<GlobalAssignment> oracle = enumerate_global_sections(sm);
    INFO("round " << round);
    REQUIRE(po.consistent == !oracle.empty());
    if (po.consistent)
      REQUIRE(is_global_section(sm, GlobalAssignment{po.solution}));
    else
      REQUIRE(verify_parity_contradiction(*ps, po.contradiction_rows));
  }
}

TEST_CASE("ternary outcomes work through the whole solver") {
  // t has three outcomes; only t=0 and t=2 admit global sections.
  Scenario s;
  s.observables = {{"t", 3, {}}, {"u", 2, {}}, {"v", 2, {}}};
  s.contexts = {{"C1", {"t", "u"}}, {"C2", {"t", "v"}}};
  SupportModel sm;
  sm.scenario = s;
  sm.support["C1"] = {OutcomeTuple{0, 0}, OutcomeTuple{1, 1}, OutcomeTuple{2, 0}};
  sm.support["C2"] = {OutcomeTuple{0, 1}, OutcomeTuple{2, 0}};

  REQUIRE(sections_over(s, {"t", "u"}).size() == 6);

  auto oracle = enumerate_global_sections(sm);
  REQUIRE(oracle.size() == 2);
  REQUIRE(oracle.front().assignment == std::map<std::string, int>{{"t", 0}, {"u", 0}, {"v", 1}});
  REQUIRE(oracle.back().assignment == std::map<std::string, int>{{"t", 2}, {"u", 0}, {"v", 0}});

  REQUIRE_FALSE(build_parity_system(sm).has_value());  // not all binary

  Classification c = classify(sm);
  REQUIRE(c.level == Level::logically_contextual);
  REQUIRE(c.non_extendable->context == "C1");
  REQUIRE(c.non_extendable->tuple == OutcomeTuple{1, 1});
}

TEST_CASE("parallel solves match sequential results") {
  SupportModel ghz = support_of(make_preset("ghz-ab").model);
  std::vector<Section> seeds;
  for (const auto& ctx : ghz.scenario.contexts)
    for (const auto& tuple : ghz.support.at(ctx.name))
      seeds.push_back(section_of(ghz.scenario, ctx.name, tuple));

  std::vector<ExtendOutcome> sequential;
  for (const auto& seed : seeds) sequential.push_back(extend_section(ghz, seed, true));

  std::vector<ExtendOutcome> parallel(seeds.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < seeds.size(); ++i)
    pool.emplace_back([&, i] { parallel[i] = extend_section(ghz, seeds[i], true); });
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < seeds.size(); ++i) {
    REQUIRE(parallel[i].extension == sequential[i].extension);
    REQUIRE(parallel[i].trace->nodes.size() == sequential[i].trace->nodes.size());
  }
}

TEST_CASE("the oracle cap rejects oversized scenarios") {
  Scenario s;
  for (int i = 0; i < 30; ++i)
    s.observables.push_back({"o" + std::to_string(i), 2, {}});
  Context big;
  big.name = "C";
  for (int i = 0; i < 30; ++i) big.observables.push_back("o" + std::to_string(i));
  s.contexts = {big};
  SupportModel sm;
  sm.scenario = s;
  sm.support["C"] = {OutcomeTuple(30, 0)};
  REQUIRE_THROWS_WITH(enumerate_global_sections(sm),
                      Catch::Matchers::ContainsSubstring("oracle cap"));
}
