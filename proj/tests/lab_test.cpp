#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "hamlab/lab.hpp"
#include "test_util.hpp"

using namespace hamlab;

TEST(BruteForce, Examples) {
  const auto c6 = brute_force_hamiltonian(Digraph::cycle(6));
  ASSERT_TRUE(c6.has_value());
  EXPECT_TRUE(verify_hamilton_cycle(Digraph::cycle(6), *c6));
  EXPECT_FALSE(brute_force_hamiltonian(gen_extremal_chvatal(10, 4)).has_value());
  EXPECT_TRUE(brute_force_hamiltonian(Digraph::complete(8)).has_value());
  try {
    brute_force_hamiltonian(Digraph::complete(21));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::scale);
  }
}

TEST(BruteForce, AgreesWithPermutationEnumeration) {
  std::mt19937_64 rng(5);
  int yes = 0, no = 0;
  for (int run = 0; run < 300; ++run) {
    const int n = std::uniform_int_distribution<int>(2, 9)(rng);
    const double p = std::uniform_real_distribution<double>(0.15, 0.6)(rng);
    const auto g = testutil::random_digraph(n, p, rng);
    const auto cert = brute_force_hamiltonian(g);
    ASSERT_EQ(cert.has_value(), testutil::permutation_hamiltonian(g));
    if (cert) {
      EXPECT_TRUE(verify_hamilton_cycle(g, *cert));
      ++yes;
    } else {
      ++no;
    }
  }
  EXPECT_GT(yes, 30);
  EXPECT_GT(no, 30);
}

TEST(RandomCondition, PassesChecker) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto g = gen_random_condition(16, Rational(1, 4), s);
    EXPECT_EQ(g.order(), 16);
    EXPECT_TRUE(check_semi_exact(g, Rational(1, 4)).holds);
  }
  EXPECT_EQ(gen_random_condition(14, Rational(1, 4), 3).edges(), gen_random_condition(14, Rational(1, 4), 3).edges());
}

TEST(RandomCondition, NearHalfBeta) {
  int gh = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto g = gen_random_condition(16, Rational(15, 32), s);
    EXPECT_TRUE(check_semi_exact(g, Rational(15, 32)).holds);
    gh += check_ghouila_houri(g).holds;
  }
  EXPECT_GE(gh, 10);
}

TEST(RandomCondition, Parameters) {
  for (const auto& b : {Rational(1, 2), Rational(3, 4), Rational(0)}) {
    try {
      gen_random_condition(10, b, 0);
      FAIL() << "expected an error";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::parameter);
    }
  }
  try {
    gen_random_condition(16, Rational(1, 4), 0, 0.0, 1);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::generation);
  }
}

TEST(Experiment, EmptySpecList) {
  const auto rep = run_experiment({}, 4);
  EXPECT_TRUE(rep.records.empty());
  EXPECT_EQ(to_json(rep)["aggregate"]["instances"], 0);
}

TEST(Experiment, CampaignAndDeterminism) {
  auto specs = specs_from_json(nlohmann::json::parse(R"([
    {"generator": "random_condition", "params": {"n": 12, "beta": "1/4"}, "seeds": [0, 6]},
    {"generator": "extremal_chvatal", "params": {"n": 10, "k": 4}, "seed": 1},
    {"generator": "concluding", "params": {"n": 10, "a": "1/5"}, "seed": 2},
    {"generator": "blowup", "params": {"k": 8, "m": 10, "density": "7/10", "v0": 1}, "seed": 3},
    {"generator": "random_condition", "params": {"n": 12, "beta": "1/4"}, "seed": 0}
  ])"));
  ASSERT_EQ(specs.size(), 10u);
  const auto a = run_experiment(specs, 3);
  const auto b = run_experiment(specs, 1);
  ASSERT_EQ(a.records.size(), specs.size());
  EXPECT_EQ(to_json(a, false).dump(), to_json(b, false).dump());
  // duplicate seed gives the identical record
  EXPECT_EQ(to_json(a.records[0], false).dump(), to_json(a.records[9], false).dump());

  const auto& ext = a.records[6];
  EXPECT_EQ(ext.oracle, "non-hamiltonian");
  EXPECT_EQ(ext.solver, "none");
  EXPECT_EQ(ext.agree, std::optional<bool>(true));
  const auto& blow = a.records[8];
  EXPECT_EQ(blow.n, 81);
  EXPECT_EQ(blow.solver, "found");
  EXPECT_EQ(blow.oracle, "skipped");
  for (int i = 0; i < 6; ++i) {
    EXPECT_TRUE(a.records[i].verdicts[3].second) << "semi-exact verdict";
    EXPECT_TRUE(a.records[i].agree.value_or(false));
  }
  EXPECT_EQ(a.disagreements, 0);
  EXPECT_EQ(a.errors, 0);

  const auto csv = to_csv(a);
  EXPECT_EQ(csv.rfind("# hamlab experiment csv v1\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 12);
}

TEST(Experiment, ErrorsAreRecorded) {
  const std::vector<InstanceSpec> specs{
      {Generator::extremal_chvatal, {{"n", 6}, {"k", 3}}, 0},
      {Generator::blowup, {{"k", 6}, {"m", 10}}, 0},
  };
  const auto rep = run_experiment(specs, 2);
  ASSERT_EQ(rep.records.size(), 2u);
  EXPECT_EQ(rep.errors, 2);
  EXPECT_NE(rep.records[0].error.find("parameter"), std::string::npos);
}

TEST(Experiment, MalformedSpec) {
  EXPECT_THROW(specs_from_json(nlohmann::json::parse(R"({"generator": "nope"})")), Error);
  EXPECT_THROW(specs_from_json(nlohmann::json::parse(R"({"params": {}})")), Error);
  EXPECT_THROW(specs_from_json(nlohmann::json::parse(R"({"generator": "concluding", "seeds": [3, 1]})")), Error);
}

TEST(Experiment, DeterministicEnvForcesOneWorker) {
  setenv("HAMLAB_DETERMINISTIC", "1", 1);
  EXPECT_TRUE(deterministic_env());
  const auto rep = run_experiment({{Generator::random_condition, {{"n", 10}}, 4}}, 8);
  EXPECT_EQ(rep.records.size(), 1u);
  unsetenv("HAMLAB_DETERMINISTIC");
  EXPECT_FALSE(deterministic_env());
}
