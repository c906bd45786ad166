#include "treexplain/batch.hpp"

#include <gtest/gtest.h>

#include <atomic>

#include "test_util.hpp"
#include "treexplain/oracle.hpp"
#include "treexplain/treeshap.hpp"

namespace treexplain {
namespace {

TEST(ParallelForTest, CoversEveryIndexOnce) {
  for (unsigned threads : {1U, 2U, 3U, 8U}) {
    for (std::size_t count : {0UL, 1UL, 7UL, 100UL}) {
      std::vector<std::atomic<int>> hits(count);
      parallel_for(count, threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) ++hits[i];
      });
      for (std::size_t i = 0; i < count; ++i) EXPECT_EQ(hits[i].load(), 1);
    }
  }
}

TEST(ParallelForTest, PropagatesErrors) {
  EXPECT_THROW(parallel_for(10, 4, [](std::size_t b, std::size_t) {
                 if (b > 0) throw Error(ErrorKind::kInvalidArgument, "boom");
               }),
               Error);
}

TEST(ParallelForTest, ResolveThreads) {
  EXPECT_GE(resolve_threads(0), 1U);
  EXPECT_EQ(resolve_threads(5), 5U);
}

TEST(BatchExplainTest, IndependentOfThreadCount) {
  Rng rng(1);
  RandomEnsembleConfig rc;
  rc.num_trees = 8;
  rc.max_depth = 5;
  rc.num_features = 6;
  const auto e = random_ensemble(rc, rng);
  const auto data = random_dataset(6, 37, rng);
  for (auto method : {AttributionMethod::kTreeShap, AttributionMethod::kSaabas, AttributionMethod::kBrute}) {
    const auto one = batch_explain(e, data, method, 1);
    const auto many = batch_explain(e, data, method, 4);
    ASSERT_EQ(one.size(), 37u);
    for (std::size_t r = 0; r < one.size(); ++r) {
      EXPECT_EQ(one[r].phi, many[r].phi);
      EXPECT_EQ(one[r].phi0, many[r].phi0);
    }
  }
  const auto i1 = batch_interactions(e, data, 1);
  const auto i4 = batch_interactions(e, data, 3);
  for (std::size_t r = 0; r < i1.size(); ++r) EXPECT_EQ(i1[r].values, i4[r].values);
}

TEST(BatchExplainTest, MatchesSingleRowCalls) {
  const auto a = fixture_model_a();
  const auto data = fixture_dataset();
  const auto rows = batch_explain(a, data);
  for (std::size_t r = 0; r < data.rows(); ++r) EXPECT_EQ(rows[r].phi, ensemble_shap(a, data.row(r)).phi);
}

TEST(BatchExplainTest, Errors) {
  const auto a = fixture_model_a();
  EXPECT_THROW(batch_explain(a, Dataset(1, 3, {0, 0, 0})), Error);
  EXPECT_THROW(batch_explain(a, fixture_dataset(), AttributionMethod::kGain), Error);
  EXPECT_TRUE(batch_explain(a, Dataset(0, 2, {})).empty());
}

TEST(BatchExplainTest, ErrorNamesRow) {
  Rng rng(2);
  RandomEnsembleConfig rc;
  rc.num_trees = 3;
  rc.max_depth = 6;
  rc.num_features = 40;
  rc.full = true;
  const auto e = random_ensemble(rc, rng);
  ASSERT_GT(e.used_features().size(), kDefaultOracleCap);
  try {
    batch_explain(e, random_dataset(40, 1, rng), AttributionMethod::kBrute);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::kTooManyFeatures);
    EXPECT_EQ(std::string(err.what()).rfind("row 0: ", 0), 0u) << err.what();
  }
}

}  // namespace
}  // namespace treexplain
