#include "treexplain/treeshap.hpp"

#include <gtest/gtest.h>

#include "consistency.hpp"
#include "reference.hpp"
#include "test_util.hpp"
#include "treexplain/oracle.hpp"

namespace treexplain {
namespace {

using testing::MakeRandomCase;
using testing::MaxAbsDiff;
using testing::Stump;

const std::vector<double> kYesYes{1.0, 1.0};

TEST(TreeShapTest, FixtureValues) {
  const auto a = ensemble_shap(fixture_model_a(), kYesYes);
  const auto b = ensemble_shap(fixture_model_b(), kYesYes);
  EXPECT_NEAR(a.phi[0], 30.0, 1e-10);
  EXPECT_NEAR(a.phi[1], 30.0, 1e-10);
  EXPECT_NEAR(b.phi[0], 30.0, 1e-10);
  EXPECT_NEAR(b.phi[1], 35.0, 1e-10);
  EXPECT_DOUBLE_EQ(a.phi0, 20.0);
  EXPECT_DOUBLE_EQ(a.output, 80.0);
  EXPECT_DOUBLE_EQ(b.phi0, 25.0);
  EXPECT_DOUBLE_EQ(b.output, 90.0);
}

TEST(TreeShapTest, AllFixtureInputs) {
  const auto data = fixture_dataset();
  for (const auto& model : {fixture_model_a(), fixture_model_b()}) {
    for (std::size_t r = 0; r < data.rows(); ++r) {
      EXPECT_LE(MaxAbsDiff(ensemble_shap(model, data.row(r)), brute_shap(model, data.row(r))), 1e-12);
    }
  }
}

TEST(TreeShapTest, StumpGetsFullCredit) {
  const TreeEnsemble e({Stump(1, 0.5, 2.0, 6.0, 3.0, 1.0)}, 0.0, 3);
  const std::vector<double> x{0.0, 0.9, 0.0};
  const auto a = ensemble_shap(e, x);
  EXPECT_DOUBLE_EQ(a.phi0, 3.0);
  EXPECT_DOUBLE_EQ(a.phi[1], 3.0);
  EXPECT_EQ(a.phi[0], 0.0);
  EXPECT_EQ(a.phi[2], 0.0);
}

TEST(TreeShapTest, EmptyEnsemble) {
  const TreeEnsemble e({}, 1.5, 2);
  const auto a = ensemble_shap(e, kYesYes);
  EXPECT_EQ(a.phi0, 1.5);
  EXPECT_EQ(a.output, 1.5);
  EXPECT_EQ(a.phi, (std::vector<double>{0.0, 0.0}));
}

TEST(TreeShapTest, MatchesOracleOnRandomEnsembles) {
  Rng rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const auto c = MakeRandomCase(rng, 10, 6, 12);
    EXPECT_LE(MaxAbsDiff(ensemble_shap(c.ensemble, c.x), brute_shap(c.ensemble, c.x)), 1e-8) << trial;
  }
}

TEST(TreeShapTest, MatchesPermutationShapley) {
  Rng rng(102);
  for (int trial = 0; trial < 40; ++trial) {
    const auto c = MakeRandomCase(rng, 3, 5, 5);
    EXPECT_LE(MaxAbsDiff(ensemble_shap(c.ensemble, c.x).phi, reference::PermutationShapley(c.ensemble, c.x)),
              1e-9);
  }
}

TEST(TreeShapTest, RepeatedFeatureOnPath) {
  // Same feature at every level: only that feature gets credit.
  Tree t;
  t.features = {0, 0, kLeaf, kLeaf, 0, kLeaf, kLeaf};
  t.left = {1, 2, kLeaf, kLeaf, 5, kLeaf, kLeaf};
  t.right = {4, 3, kLeaf, kLeaf, 6, kLeaf, kLeaf};
  t.thresholds = {0.5, 0.25, 0, 0, 0.75, 0, 0};
  t.values = {0, 0, 1, 2, 0, 3, 4};
  t.covers = {10, 4, 1, 3, 6, 2, 4};
  const TreeEnsemble e({t}, 0.0, 2);
  for (double v : {0.1, 0.25, 0.4, 0.6, 0.8}) {
    const std::vector<double> x{v, 0.3};
    const auto a = ensemble_shap(e, x);
    EXPECT_NEAR(a.phi[0], a.output - a.phi0, 1e-12);
    EXPECT_EQ(a.phi[1], 0.0);
  }
}

TEST(TreeShapTest, ZeroCoverLeaf) {
  Tree t = Stump(0, 0.5, 5.0, 1.0, 0.0, 2.0);
  const TreeEnsemble e({t, Stump(1, 0.5, 0.0, 2.0)}, 0.0, 2);
  for (double v : {0.2, 0.8}) {
    const std::vector<double> x{v, 0.9};
    EXPECT_LE(MaxAbsDiff(ensemble_shap(e, x), brute_shap(e, x)), 1e-12);
  }
}

TEST(TreeShapTest, LocalAccuracy) {
  Rng rng(103);
  for (int trial = 0; trial < 300; ++trial) {
    RandomEnsembleConfig rc;
    rc.num_trees = 20;
    rc.max_depth = 8;
    rc.num_features = 30;
    rc.value_scale = 100.0;
    const auto e = random_ensemble(rc, rng);
    const auto a = ensemble_shap(e, random_input(e, rng, 0.1));
    EXPECT_LE(a.local_accuracy_error(), 1e-6 * std::max(1.0, std::abs(a.output)));
  }
}

TEST(TreeShapTest, CompensatedSummationAgrees) {
  Rng rng(104);
  TreeShapOptions opts;
  opts.compensated = true;
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = MakeRandomCase(rng, 10, 8, 10);
    EXPECT_LE(MaxAbsDiff(ensemble_shap(c.ensemble, c.x, opts), ensemble_shap(c.ensemble, c.x)), 1e-9);
  }
}

TEST(TreeShapTest, WeightPerturbationIsDetected) {
  Rng rng(105);
  TreeShapOptions opts;
  opts.weight_perturbation = 1e-3;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = MakeRandomCase(rng, 5, 5, 6);
    worst = std::max(worst, MaxAbsDiff(ensemble_shap(c.ensemble, c.x, opts), brute_shap(c.ensemble, c.x)));
  }
  EXPECT_GT(worst, 1e-6);
}

TEST(TreeShapTest, PerTreeAccumulates) {
  const auto a = fixture_model_a();
  std::vector<double> phi{1.0, 1.0};
  tree_shap(a.tree(0), kYesYes, phi);
  EXPECT_NEAR(phi[0], 31.0, 1e-12);
  EXPECT_NEAR(phi[1], 31.0, 1e-12);
}

TEST(TreeShapTest, DimensionMismatch) {
  const std::vector<double> x{1.0};
  EXPECT_THROW(ensemble_shap(fixture_model_a(), x), Error);
}

TEST(ConditionalTest, ModelA) {
  const auto a = fixture_model_a();
  const auto present = conditional_ensemble_shap(a, kYesYes, 1, Condition::kPresent);
  const auto absent = conditional_ensemble_shap(a, kYesYes, 1, Condition::kAbsent);
  EXPECT_NEAR(present.phi[0], 40.0, 1e-12);
  EXPECT_NEAR(absent.phi[0], 20.0, 1e-12);
  EXPECT_EQ(present.phi[1], 0.0);
  EXPECT_DOUBLE_EQ(present.phi0, 40.0);
  EXPECT_DOUBLE_EQ(present.output, 80.0);
  EXPECT_DOUBLE_EQ(absent.phi0, 20.0);
  EXPECT_DOUBLE_EQ(absent.output, 40.0);
}

TEST(ConditionalTest, MatchesOracleWithFeatureFixed) {
  // Present: j joins every coalition. Absent: j never does. Both are games on
  // the remaining players, which the oracle computes with j held present or
  // marginalized.
  Rng rng(106);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = MakeRandomCase(rng, 5, 5, 7);
    const int m = c.ensemble.num_features();
    const int j = static_cast<int>(rng.index(static_cast<std::uint64_t>(m)));
    std::vector<int> others;
    for (int f = 0; f < m; ++f) {
      if (f != j) others.push_back(f);
    }
    OracleOptions opts;
    opts.players = others;
    const auto want_present = brute_shap(c.ensemble, c.x, opts);
    const auto got_present = conditional_ensemble_shap(c.ensemble, c.x, j, Condition::kPresent);
    EXPECT_LE(MaxAbsDiff(got_present, want_present), 1e-9);
    EXPECT_NEAR(got_present.output, want_present.output, 1e-9);

    // Absent game: value of S is exp_value(S) without j.
    const std::size_t n = others.size();
    SubsetValueTable table;
    table.players = others;
    table.values.resize(std::size_t{1} << n);
    for (std::size_t mask = 0; mask < table.values.size(); ++mask) {
      FeatureSubset s(m);
      for (std::size_t b = 0; b < n; ++b) {
        if (mask >> b & 1U) s.insert(others[b]);
      }
      table.values[mask] = exp_value(c.ensemble, c.x, s);
    }
    table.full_output = table.values.back();
    const auto want_absent = shap_from_table(table, m);
    const auto got_absent = conditional_ensemble_shap(c.ensemble, c.x, j, Condition::kAbsent);
    EXPECT_LE(MaxAbsDiff(got_absent, want_absent), 1e-9);
    EXPECT_NEAR(got_absent.output, want_absent.output, 1e-9);
  }
}

TEST(ConditionalTest, BadFeature) {
  EXPECT_THROW(conditional_ensemble_shap(fixture_model_a(), kYesYes, 2, Condition::kPresent), Error);
}

TEST(InteractionsTest, ModelA) {
  const auto m = shap_interactions(fixture_model_a(), kYesYes);
  EXPECT_NEAR(m.at(0, 1), 10.0, 1e-10);
  EXPECT_NEAR(m.at(1, 0), 10.0, 1e-10);
  EXPECT_NEAR(m.at(0, 0), 20.0, 1e-10);
  EXPECT_NEAR(m.at(1, 1), 20.0, 1e-10);
}

TEST(InteractionsTest, MatchesOracle) {
  Rng rng(107);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = MakeRandomCase(rng, 10, 6, 10);
    const auto got = shap_interactions(c.ensemble, c.x);
    EXPECT_LE(MaxAbsDiff(got, brute_interactions(c.ensemble, c.x)), 1e-8) << trial;
    EXPECT_LE(got.max_asymmetry(), 1e-8);
  }
}

TEST(InteractionsTest, MatchesInteractionIndexReference) {
  Rng rng(108);
  for (int trial = 0; trial < 30; ++trial) {
    const auto c = MakeRandomCase(rng, 3, 4, 5);
    EXPECT_LE(MaxAbsDiff(shap_interactions(c.ensemble, c.x).values, reference::InteractionIndex(c.ensemble, c.x)),
              1e-9);
  }
}

TEST(InteractionsTest, AdditiveModelExactZeros) {
  const TreeEnsemble e({Stump(0, 0.5, 1.0, 3.0), Stump(1, 0.5, -2.0, 5.0)}, 0.0, 3);
  const std::vector<double> x{0.9, 0.1, 0.0};
  const auto m = shap_interactions(e, x);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) EXPECT_EQ(m.at(i, j), 0.0) << i << "," << j;
    }
  }
  EXPECT_DOUBLE_EQ(m.at(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(m.at(1, 1), -3.5);
  EXPECT_EQ(m.at(2, 2), 0.0);
}

TEST(InteractionsTest, UnusedFeatureRowsAreZero) {
  Rng rng(109);
  const TreeEnsemble e({Stump(0, 0.5, 1.0, 3.0)}, 0.0, 4);
  const auto m = shap_interactions(e, random_input(4, rng));
  for (int i = 1; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      EXPECT_EQ(m.at(i, j), 0.0);
      EXPECT_EQ(m.at(j, i), 0.0);
    }
  }
}

TEST(ComplexityTest, NodeVisitsMatchTreeSize) {
  // Without duplicate features every node is visited exactly once.
  Rng rng(110);
  RandomEnsembleConfig rc;
  rc.num_trees = 3;
  rc.max_depth = 6;
  rc.num_features = 50;
  rc.full = true;
  const auto e = random_ensemble(rc, rng);
  WorkCounter counter;
  TreeShapOptions opts;
  opts.counter = &counter;
  ensemble_shap(e, random_input(50, rng), opts);
  EXPECT_LE(counter.node_visits, 3u * 127u);
}

TEST(ComplexityTest, WorkBoundedByLeavesTimesDepthSquared) {
  Rng rng(111);
  for (int depth = 2; depth <= 10; ++depth) {
    RandomEnsembleConfig rc;
    rc.num_trees = 4;
    rc.max_depth = depth;
    rc.num_features = 2 * depth;
    rc.full = true;
    const auto e = random_ensemble(rc, rng);
    WorkCounter counter;
    TreeShapOptions opts;
    opts.counter = &counter;
    ensemble_shap(e, random_input(e.num_features(), rng), opts);
    const double bound = 4.0 * (1 << depth) * depth * depth;
    EXPECT_LE(static_cast<double>(counter.total()) / bound, 4.0) << "depth " << depth;
  }
}

TEST(ConsistencyTest, LeafRaiseNeverLowersShap) {
  testing::ConsistencyReport report;
  testing::RunLeafRaiseEdits(112, 100, 20, report);
  EXPECT_EQ(report.edits, 100);
  EXPECT_EQ(report.shap_violations, 0) << "worst drop " << report.worst_shap_drop;
}

TEST(ConsistencyTest, FixtureWitness) {
  testing::ConsistencyReport report;
  testing::RunPlantedWitness(report);
  EXPECT_EQ(report.shap_violations, 0);
  EXPECT_EQ(report.saabas_violations, 1);
  EXPECT_EQ(report.gain_rank_violations, 1);
}

}  // namespace
}  // namespace treexplain
