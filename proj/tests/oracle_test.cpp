#include "treexplain/oracle.hpp"

#include <gtest/gtest.h>

#include "reference.hpp"
#include "test_util.hpp"

namespace treexplain {
namespace {

using testing::MakeRandomCase;
using testing::MaxAbsDiff;

const std::vector<double> kYesYes{1.0, 1.0};

TEST(ExpValueTest, FixtureModelA) {
  const auto a = fixture_model_a();
  EXPECT_DOUBLE_EQ(exp_value(a, kYesYes, FeatureSubset(2)), 20.0);
  EXPECT_DOUBLE_EQ(exp_value(a, kYesYes, FeatureSubset(2, {0})), 40.0);
  EXPECT_DOUBLE_EQ(exp_value(a, kYesYes, FeatureSubset(2, {1})), 40.0);
  EXPECT_DOUBLE_EQ(exp_value(a, kYesYes, FeatureSubset(2, {0, 1})), 80.0);
}

TEST(ExpValueTest, FixtureModelB) {
  const auto b = fixture_model_b();
  EXPECT_DOUBLE_EQ(exp_value(b, kYesYes, FeatureSubset(2)), 25.0);
  EXPECT_DOUBLE_EQ(exp_value(b, kYesYes, FeatureSubset(2, {1})), 50.0);
  EXPECT_DOUBLE_EQ(exp_value(b, kYesYes, FeatureSubset(2, {0})), 45.0);
}

TEST(ExpValueTest, EndpointsAreMeanAndPrediction) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = MakeRandomCase(rng, 4, 5, 5);
    const int m = c.ensemble.num_features();
    FeatureSubset all(m);
    for (int f = 0; f < m; ++f) all.insert(f);
    EXPECT_NEAR(exp_value(c.ensemble, c.x, all), predict(c.ensemble, c.x), 1e-9);
    EXPECT_NEAR(exp_value(c.ensemble, c.x, FeatureSubset(m)), expected_value(c.ensemble), 1e-9);
  }
}

TEST(ExpValueTest, MatchesLeafEnumeration) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = MakeRandomCase(rng, 3, 6, 6);
    const int m = c.ensemble.num_features();
    for (int rep = 0; rep < 4; ++rep) {
      FeatureSubset s(m);
      std::vector<bool> known(static_cast<std::size_t>(m), false);
      for (int f = 0; f < m; ++f) {
        if (rng.bernoulli(0.5)) {
          s.insert(f);
          known[static_cast<std::size_t>(f)] = true;
        }
      }
      EXPECT_NEAR(exp_value(c.ensemble, c.x, s), reference::ConditionalExpectation(c.ensemble, c.x, known),
                  1e-9);
    }
  }
}

TEST(FeatureSubsetTest, Membership) {
  FeatureSubset s(4, {1, 3});
  EXPECT_TRUE(s.contains(1));
  EXPECT_FALSE(s.contains(2));
  EXPECT_EQ(s.count(), 2u);
  s.erase(1);
  EXPECT_EQ(s.count(), 1u);
  EXPECT_THROW(s.insert(4), Error);
}

TEST(BruteShapTest, FixtureValues) {
  const auto a = brute_shap(fixture_model_a(), kYesYes);
  const auto b = brute_shap(fixture_model_b(), kYesYes);
  EXPECT_NEAR(a.phi[0], 30.0, 1e-12);
  EXPECT_NEAR(a.phi[1], 30.0, 1e-12);
  EXPECT_NEAR(b.phi[0], 30.0, 1e-12);
  EXPECT_NEAR(b.phi[1], 35.0, 1e-12);
  EXPECT_DOUBLE_EQ(a.phi0, 20.0);
  EXPECT_DOUBLE_EQ(b.phi0, 25.0);
}

TEST(BruteShapTest, MatchesPermutationShapley) {
  Rng rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    const auto c = MakeRandomCase(rng, 4, 5, 6);
    const auto got = brute_shap(c.ensemble, c.x);
    const auto want = reference::PermutationShapley(c.ensemble, c.x);
    EXPECT_LE(MaxAbsDiff(got.phi, want), 1e-9) << "trial " << trial;
  }
}

TEST(BruteShapTest, EfficiencyAndNullPlayer) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = MakeRandomCase(rng, 5, 5, 8);
    const auto a = brute_shap(c.ensemble, c.x);
    EXPECT_NEAR(a.phi0, expected_value(c.ensemble), 1e-9);
    EXPECT_LE(a.local_accuracy_error(), 1e-9 * std::max(1.0, std::abs(a.output)));
    const auto used = c.ensemble.used_features();
    for (int f = 0; f < c.ensemble.num_features(); ++f) {
      if (std::find(used.begin(), used.end(), f) == used.end()) {
        EXPECT_EQ(a.phi[static_cast<std::size_t>(f)], 0.0);
      }
    }
  }
}

TEST(BruteShapTest, UsedFeatureEnumerationEqualsFullEnumeration) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const auto c = MakeRandomCase(rng, 2, 3, 9);
    OracleOptions all;
    all.enumerate_all_features = true;
    EXPECT_LE(MaxAbsDiff(brute_shap(c.ensemble, c.x), brute_shap(c.ensemble, c.x, all)), 1e-10);
    EXPECT_LE(MaxAbsDiff(brute_interactions(c.ensemble, c.x), brute_interactions(c.ensemble, c.x, all)),
              1e-10);
  }
}

TEST(BruteShapTest, ExplicitPlayersHoldOthersPresent) {
  // Only Cough is a player: Fever is fixed at x, so the game is Cough's
  // effect given Fever = Yes.
  OracleOptions opts;
  opts.players = std::vector<int>{1};
  const auto a = brute_shap(fixture_model_a(), kYesYes, opts);
  EXPECT_DOUBLE_EQ(a.phi0, 40.0);
  EXPECT_DOUBLE_EQ(a.phi[1], 40.0);
  EXPECT_DOUBLE_EQ(a.phi[0], 0.0);
  opts.players = std::vector<int>{5};
  EXPECT_THROW(brute_shap(fixture_model_a(), kYesYes, opts), Error);
}

TEST(BruteShapTest, CapEnforced) {
  Rng rng(6);
  RandomEnsembleConfig rc;
  rc.num_trees = 3;
  rc.max_depth = 6;
  rc.num_features = 30;
  rc.full = true;
  const auto e = random_ensemble(rc, rng);
  ASSERT_GT(e.used_features().size(), 12u);
  OracleOptions opts;
  opts.cap = 12;
  try {
    brute_shap(e, random_input(30, rng), opts);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::kTooManyFeatures);
  }
}

TEST(BruteShapTest, DimensionMismatch) {
  const std::vector<double> x{1.0, 1.0, 1.0};
  EXPECT_THROW(brute_shap(fixture_model_a(), x), Error);
}

TEST(BruteInteractionsTest, ModelA) {
  // Pure AND: v = {20, 40, 40, 80}; the single pairwise term is
  // (80 - 40 - 40 + 20) / 2 = 10 and each main effect is 30 - 10.
  const auto m = brute_interactions(fixture_model_a(), kYesYes);
  EXPECT_NEAR(m.at(0, 1), 10.0, 1e-12);
  EXPECT_NEAR(m.at(1, 0), 10.0, 1e-12);
  EXPECT_NEAR(m.at(0, 0), 20.0, 1e-12);
  EXPECT_NEAR(m.at(1, 1), 20.0, 1e-12);
  EXPECT_DOUBLE_EQ(m.phi0, 20.0);
}

TEST(BruteInteractionsTest, MatchesInteractionIndex) {
  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const auto c = MakeRandomCase(rng, 3, 4, 5);
    const auto got = brute_interactions(c.ensemble, c.x);
    const auto want = reference::InteractionIndex(c.ensemble, c.x);
    EXPECT_LE(MaxAbsDiff(got.values, want), 1e-9) << "trial " << trial;
  }
}

TEST(BruteInteractionsTest, SymmetricAndRowsSumToShap) {
  Rng rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    const auto c = MakeRandomCase(rng, 4, 5, 7);
    const auto m = brute_interactions(c.ensemble, c.x);
    const auto s = brute_shap(c.ensemble, c.x);
    EXPECT_LE(m.max_asymmetry(), 1e-8);
    for (int i = 0; i < m.num_features; ++i) {
      EXPECT_NEAR(m.row_sum(i), s.phi[static_cast<std::size_t>(i)], 1e-8);
    }
  }
}

TEST(BruteInteractionsTest, AdditiveModelHasNoOffDiagonal) {
  const TreeEnsemble e({testing::Stump(0, 0.5, 1.0, 3.0), testing::Stump(1, 0.5, -2.0, 5.0)}, 0.0, 2);
  const auto m = brute_interactions(e, kYesYes);
  EXPECT_EQ(m.at(0, 1), 0.0);
  EXPECT_EQ(m.at(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(m.at(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(m.at(1, 1), 3.5);
}

}  // namespace
}  // namespace treexplain
