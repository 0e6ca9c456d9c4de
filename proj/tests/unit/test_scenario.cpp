#include <odorsim/scenario.hpp>

#include <gtest/gtest.h>

using namespace odorsim;
using namespace odorsim::scenario;

TEST(Scenario, CannedScenariosLoad) {
  ASSERT_EQ(canned_names().size(), 4u);
  for (const auto& name : canned_names()) {
    const auto s = load_scenario(*canned_scenario(name));
    EXPECT_EQ(s.config.n_agents, 4) << name;
    EXPECT_EQ(s.hash, fnv1a64(s.canonical_json));
  }
  EXPECT_FALSE(canned_scenario("nope").has_value());
}

TEST(Scenario, FormationOffsets) {
  const auto s = load_scenario(*canned_scenario("paper_formation"));
  ASSERT_EQ(s.config.offsets.size(), 4u);
  EXPECT_EQ(s.config.offsets[3](0), 1.5);
  EXPECT_EQ(s.config.scenario, sim::ScenarioKind::Formation);
}

TEST(Scenario, MissingKeysTakeDefaults) {
  const auto s = load_scenario("{}");
  EXPECT_EQ(s.config.smc.mu, 5.0);
  EXPECT_EQ(s.config.time.dt, 1e-3);
  EXPECT_EQ(s.canonical_json, load_scenario(default_scenario_json()).canonical_json);
}

TEST(Scenario, UnknownKeyIsNamed) {
  try {
    load_scenario(R"({"smc": {"muu": 3}})");
    FAIL();
  } catch (const sim::ConfigError& e) {
    EXPECT_EQ(e.key(), "smc.muu");
  }
}

TEST(Scenario, ValidationNamesTheta) {
  try {
    load_scenario("{}", {"theta=0"});
    FAIL();
  } catch (const sim::ConfigError& e) {
    EXPECT_EQ(e.key(), "theta");
  }
  try {
    load_scenario("{}", {"theta=-1"});
    FAIL();
  } catch (const sim::ConfigError& e) {
    EXPECT_EQ(e.key(), "theta");
  }
}

TEST(Scenario, OverridesApplyAndChangeHash) {
  const auto a = load_scenario("{}");
  const auto b = load_scenario("{}", {"smc.mu=6", "planner.casting=literal"});
  EXPECT_EQ(b.config.smc.mu, 6.0);
  EXPECT_EQ(b.config.planner.casting, planner::CastingRule::Literal);
  EXPECT_NE(a.hash, b.hash);
  EXPECT_THROW(load_scenario("{}", {"smc.nothing=1"}), sim::ConfigError);
  EXPECT_THROW(load_scenario("{}", {"no_equals_sign"}), sim::ConfigError);
}

TEST(Scenario, ManifestRoundTrips) {
  const auto a = load_scenario(*canned_scenario("paper_formation"), {"seed=7"});
  const std::string manifest = R"({"schema_version": 1, "config_hash": "x", "config": )" +
                               a.canonical_json + "}";
  const auto b = load_scenario(manifest);
  EXPECT_EQ(a.canonical_json, b.canonical_json);
  EXPECT_EQ(b.config.seed, 7u);
}

TEST(Scenario, SingularTopologyRejectedUnlessDiagnosing) {
  const std::vector<std::string> o{"topology.leaders=[]"};
  EXPECT_THROW(load_scenario("{}", o), sim::ConfigError);
  EXPECT_NO_THROW(load_scenario("{}", o, false));
}

TEST(Scenario, BadJsonAndVersion) {
  EXPECT_THROW(load_scenario("{not json"), sim::ConfigError);
  EXPECT_THROW(load_scenario(R"({"schema_version": 99})"), sim::ConfigError);
  EXPECT_THROW(resolve_scenario_text("/definitely/missing.json"), sim::ConfigError);
}

TEST(Scenario, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}
