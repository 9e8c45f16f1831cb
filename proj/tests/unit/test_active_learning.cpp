#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "generators.hpp"
#include "palms/active_learning.hpp"
#include "palms/splits.hpp"

namespace palms {
namespace {

// f(x) = exp(-|x|^2) - 1, so a point at radius sqrt(-ln(1 - d)) sits at
// distance d from the boundary.
TrainedSvm bowl_model() {
  TrainedSvm m;
  m.params = {1.0, 1.0};
  m.n_features = 1;
  m.support_vectors = {{0.0}};
  m.support_ids = {0};
  m.dual_coefs = {1.0};
  m.bias = -1.0;
  return m;
}

LabeledPoint at_distance(PointId id, double d) {
  return {id, {std::sqrt(-std::log(1.0 - d))}, ClassLabel::kZero};
}

TEST(AcquireNext, PicksSmallestDistance) {
  const Dataset pool(1, {at_distance(7, 0.9), at_distance(2, 0.1), at_distance(5, 0.4)});
  EXPECT_EQ(acquire_next(bowl_model(), pool), 2u);
}

TEST(AcquireNext, TiesGoToSmallerId) {
  const Dataset pool(1, {at_distance(9, 0.2), at_distance(3, 0.2)});
  EXPECT_EQ(acquire_next(bowl_model(), pool), 3u);
}

TEST(AcquireNext, SingletonAndEmptyPool) {
  EXPECT_EQ(acquire_next(bowl_model(), Dataset(1, {at_distance(4, 0.99)})), 4u);
  EXPECT_THROW(acquire_next(bowl_model(), Dataset(1, {})), DataError);
}

struct Setup {
  Dataset init;
  Dataset pool;
  Dataset all;
};

Setup blobs(std::uint64_t seed, std::size_t per_class) {
  std::mt19937_64 gen(seed);
  auto all = testing::gaussian_blobs(gen, per_class, 2.0, 1.0);
  SeededRng rng(seed);
  auto split = stratified_initial_sample(all, 2, rng);
  return {split.selected, split.rest, all};
}

TEST(RunActiveLearning, ZeroBudgetKeepsInit) {
  auto s = blobs(1, 20);
  SimulatedOracle oracle(s.all);
  SeededRng rng(0);
  const auto rec = run_active_learning(s.init, s.pool, {1.0, 0.5}, 0,
                                       AcquisitionStrategy::kMargin, oracle, {}, rng);
  EXPECT_TRUE(rec.queries.empty());
  EXPECT_EQ(rec.final_training_set, s.init);
  EXPECT_FALSE(rec.budget_capped);
}

TEST(RunActiveLearning, FiftyFiveQueriesGiveFiftyNineLabels) {
  auto s = blobs(2, 60);
  SimulatedOracle oracle(s.all);
  SeededRng rng(0);
  const auto rec = run_active_learning(s.init, s.pool, {1.0, 0.5}, 55,
                                       AcquisitionStrategy::kMargin, oracle, {}, rng);
  EXPECT_EQ(rec.queries.size(), 55u);
  EXPECT_EQ(rec.final_training_set.size(), 59u);
  std::set<PointId> seen;
  for (const auto& p : s.init) seen.insert(p.id);
  for (const auto& q : rec.queries) EXPECT_TRUE(seen.insert(q.id).second) << q.id;
}

TEST(RunActiveLearning, BudgetBeyondPoolIsCapped) {
  auto s = blobs(3, 5);
  SimulatedOracle oracle(s.all);
  SeededRng rng(0);
  const auto rec = run_active_learning(s.init, s.pool, {1.0, 0.5}, 100,
                                       AcquisitionStrategy::kMargin, oracle, {}, rng);
  EXPECT_EQ(rec.queries.size(), s.pool.size());
  EXPECT_TRUE(rec.budget_capped);
  EXPECT_EQ(rec.final_training_set.size(), s.all.size());
}

TEST(RunActiveLearning, EachQueryIsTheMarginMinimumOfThePriorModel) {
  auto s = blobs(4, 25);
  SimulatedOracle oracle(s.all);
  SeededRng rng(0);
  const ModelParams fixed{1.0, 0.5};
  const auto rec = run_active_learning(s.init, s.pool, fixed, 15, AcquisitionStrategy::kMargin,
                                       oracle, {}, rng);
  Dataset pool = s.pool;
  for (std::size_t k = 0; k < rec.queries.size(); ++k) {
    const auto model = train_svc(rec.training_prefix(k), fixed);
    const auto& q = rec.queries[k];
    EXPECT_EQ(q.step, k);
    EXPECT_EQ(q.id, acquire_next(model, pool));
    EXPECT_DOUBLE_EQ(q.distance, boundary_distance(model, pool[pool.index_of(q.id)].x));
    pool = pool.without(std::vector<PointId>{q.id});
    // conservation: |T| + |P| constant and disjoint
    EXPECT_EQ(rec.training_prefix(k + 1).size() + pool.size(), s.all.size());
  }
}

TEST(RunActiveLearning, LabelsComeFromTheOracleNotThePool) {
  auto s = blobs(5, 15);
  std::vector<LabeledPoint> scrambled;
  for (auto p : s.pool) {
    p.y = ClassLabel::kZero;
    scrambled.push_back(p);
  }
  const Dataset blind(s.pool.n_features(), scrambled);
  SimulatedOracle oracle(s.all);
  SeededRng a(0);
  SeededRng b(0);
  const auto r1 = run_active_learning(s.init, blind, {1.0, 0.5}, 10,
                                      AcquisitionStrategy::kMargin, oracle, {}, a);
  const auto r2 = run_active_learning(s.init, s.pool, {1.0, 0.5}, 10,
                                      AcquisitionStrategy::kMargin, oracle, {}, b);
  ASSERT_EQ(r1.queries.size(), r2.queries.size());
  for (std::size_t k = 0; k < r1.queries.size(); ++k) {
    EXPECT_EQ(r1.queries[k].id, r2.queries[k].id);
    EXPECT_EQ(r1.queries[k].label, s.all[s.all.index_of(r1.queries[k].id)].y);
  }
}

TEST(RunActiveLearning, MarginRunsAreReproducible) {
  auto s = blobs(6, 30);
  SimulatedOracle oracle(s.all);
  SeededRng a(1);
  SeededRng b(999);
  const auto r1 = run_active_learning(s.init, s.pool, {1.0, 0.5}, 20,
                                      AcquisitionStrategy::kMargin, oracle, {}, a);
  const auto r2 = run_active_learning(s.init, s.pool, {1.0, 0.5}, 20,
                                      AcquisitionStrategy::kMargin, oracle, {}, b);
  EXPECT_EQ(r1.final_training_set, r2.final_training_set);
}

TEST(RunActiveLearning, InitNeedsBothClasses) {
  auto s = blobs(7, 10);
  const Dataset one_class = s.init.subset(std::vector<PointId>{s.init[0].id});
  SimulatedOracle oracle(s.all);
  SeededRng rng(0);
  EXPECT_THROW(run_active_learning(one_class, s.pool, {1.0, 0.5}, 3,
                                   AcquisitionStrategy::kMargin, oracle, {}, rng),
               DataError);
}

TEST(RunActiveLearning, OracleFailureCarriesPartialRecord) {
  auto s = blobs(8, 20);
  // answers for the first three margin queries only
  SimulatedOracle truth(s.all);
  SeededRng rng(0);
  const auto full = run_active_learning(s.init, s.pool, {1.0, 0.5}, 3,
                                        AcquisitionStrategy::kMargin, truth, {}, rng);
  std::vector<std::pair<PointId, ClassLabel>> answers;
  for (const auto& q : full.queries) answers.emplace_back(q.id, q.label);
  ScriptedOracle scripted(answers);
  try {
    run_active_learning(s.init, s.pool, {1.0, 0.5}, 10, AcquisitionStrategy::kMargin, scripted,
                        {}, rng);
    FAIL();
  } catch (const OracleFailure& e) {
    EXPECT_EQ(e.partial().queries.size(), 3u);
    EXPECT_EQ(e.partial().final_training_set.size(), 7u);
  }
}

// chi-square sanity: each pool point enters a size-m random draw with
// probability m / |pool|
TEST(RunActiveLearning, RandomDrawIsUniform) {
  const std::size_t pool_size = 20;
  const std::size_t m = 5;
  const std::size_t runs = 4000;
  std::vector<LabeledPoint> init_pts{{100, {0.0}, ClassLabel::kZero}, {101, {1.0}, ClassLabel::kOne}};
  std::vector<LabeledPoint> pool_pts;
  for (std::size_t i = 0; i < pool_size; ++i) {
    pool_pts.push_back({i, {static_cast<double>(i)}, ClassLabel::kZero});
  }
  const Dataset init(1, init_pts);
  const Dataset pool(1, pool_pts);
  SimulatedOracle oracle(pool);
  std::vector<double> hits(pool_size, 0.0);
  for (std::size_t r = 0; r < runs; ++r) {
    SeededRng rng(r);
    const auto rec = run_active_learning(init, pool, {1.0, 1.0}, m,
                                         AcquisitionStrategy::kUniformRandom, oracle, {}, rng);
    for (const auto& q : rec.queries) {
      hits[q.id] += 1.0;
      EXPECT_TRUE(std::isnan(q.distance));
    }
  }
  const double expected = static_cast<double>(runs * m) / pool_size;
  double chi2 = 0.0;
  for (double h : hits) chi2 += (h - expected) * (h - expected) / expected;
  // 19 degrees of freedom; 43.8 is the 0.999 quantile
  EXPECT_LT(chi2, 43.8);
}

}  // namespace
}  // namespace palms
