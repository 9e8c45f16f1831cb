#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "generators.hpp"
#include "naive_loocv.hpp"
#include "qp_oracle.hpp"
#include "palms/model_selection.hpp"
#include "palms/splits.hpp"

namespace palms {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LoocvScore score(double C, double gamma, double acc) {
  LoocvScore s;
  s.model = {C, gamma};
  s.accuracy = acc;
  return s;
}

ModelGrid grid_of(const std::vector<LoocvScore>& scores) {
  ModelGrid g;
  for (const auto& s : scores) g.models.push_back(s.model);
  return g;
}

// f(x) = 4 exp(-x^2) - 2: points near the origin predict 1, far points 0.
TrainedSvm well_model() {
  TrainedSvm m;
  m.params = {1.0, 1.0};
  m.n_features = 1;
  m.support_vectors = {{0.0}};
  m.support_ids = {0};
  m.dual_coefs = {4.0};
  m.bias = -2.0;
  return m;
}

// point whose decision value under well_model() is `f`
LabeledPoint with_value(PointId id, double f) {
  return {id, {std::sqrt(-std::log((f + 2.0) / 4.0))}, ClassLabel::kZero};
}

Dataset cutoff_example() {
  return Dataset(1, {with_value(0, -0.2), with_value(1, -0.5), with_value(2, -1.0),
                     with_value(3, 0.2), with_value(4, 0.4)});
}

SolverSettings tight() {
  SolverSettings s;
  s.kkt_tolerance = 1e-10;
  return s;
}

TEST(Loocv, TightClustersScorePerfectly) {
  const Dataset d(2, {{0, {0.0, 0.0}, ClassLabel::kZero},
                      {1, {0.1, 0.0}, ClassLabel::kZero},
                      {2, {10.0, 0.0}, ClassLabel::kOne},
                      {3, {10.1, 0.0}, ClassLabel::kOne}});
  const ModelParams p{1.0, 0.5};
  // value frozen from the enumeration oracle
  ASSERT_EQ(testing::naive_fold_correctness(d, p), std::vector<bool>(4, true));
  EXPECT_DOUBLE_EQ(loocv_accuracy(d, p).accuracy, 1.0);
}

TEST(Loocv, AlternatingLineUnderNearLinearModelScoresZero) {
  const Dataset d(1, {{0, {0.0}, ClassLabel::kZero},
                      {1, {1.0}, ClassLabel::kOne},
                      {2, {2.0}, ClassLabel::kZero},
                      {3, {3.0}, ClassLabel::kOne}});
  const ModelParams p{1.0, 1e-4};
  ASSERT_EQ(testing::naive_fold_correctness(d, p), std::vector<bool>(4, false));
  EXPECT_DOUBLE_EQ(loocv_accuracy(d, p).accuracy, 0.0);
}

TEST(Loocv, DuplicatedPointsAlwaysHaveTheirTwin) {
  std::mt19937_64 gen(4);
  const auto base = testing::random_instance(gen, 6, 1);
  std::vector<LabeledPoint> pts;
  for (const auto& p : base) {
    pts.push_back({2 * p.id, p.x, p.y});
    pts.push_back({2 * p.id + 1, p.x, p.y});
  }
  const Dataset twins(2, pts);
  EXPECT_DOUBLE_EQ(loocv_accuracy(twins, {1e4, 100.0}).accuracy, 1.0);
}

TEST(Loocv, RejectsInfeasibleTrainingSets) {
  const Dataset two(1, {{0, {0.0}, ClassLabel::kZero}, {1, {1.0}, ClassLabel::kOne}});
  EXPECT_THROW(loocv_accuracy(two, {1.0, 1.0}), DataError);
  const Dataset lonely(1, {{0, {0.0}, ClassLabel::kZero},
                           {1, {1.0}, ClassLabel::kZero},
                           {2, {2.0}, ClassLabel::kOne}});
  EXPECT_THROW(loocv_accuracy(lonely, {1.0, 1.0}), DataError);
}

// Property: every fold agrees with independent retraining by the exact dual
// oracle, up to rounding for probes the oracle puts on the boundary.
TEST(Loocv, MatchesNaiveOracleOnRandomInstances) {
  std::mt19937_64 gen(99);
  const double Cs[] = {0.1, 1.0, 10.0, 1e4};
  const double gammas[] = {0.01, 1.0, 100.0};
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 4 + gen() % 5;
    const auto d = testing::random_instance(gen, n, 2);
    const ModelParams p{Cs[gen() % 4], gammas[gen() % 3]};
    const auto s = loocv_accuracy(d, p, tight());
    const auto oracle = testing::naive_fold_decisions(d, p);
    for (std::size_t j = 0; j < n; ++j) {
      const double f = decision_value(train_svc(d.without_index(j), p, tight()), d[j].x);
      EXPECT_EQ(s.fold_correct[j], (label_for_value(f) == d[j].y)) << "rep " << rep;
      EXPECT_TRUE(testing::same_side(f, oracle[j]))
          << "rep " << rep << " fold " << j << " C=" << p.C << " gamma=" << p.gamma
          << " solver " << f << " oracle " << oracle[j];
    }
    const auto hits = std::count(s.fold_correct.begin(), s.fold_correct.end(), true);
    EXPECT_NEAR(s.accuracy, static_cast<double>(hits) / static_cast<double>(n), 1e-12);
  }
}

TEST(SelectBest, SmallerGammaWinsTies) {
  const std::vector<LoocvScore> s{score(1, 2, 0.8), score(1, 0.5, 0.8)};
  const auto [chosen, trace] = select_best(s, grid_of(s));
  EXPECT_EQ(chosen, (ModelParams{1, 0.5}));
  EXPECT_EQ(trace.resolved_by, TieBreak::kGamma);
  EXPECT_EQ(trace.tied.size(), 2u);
}

TEST(SelectBest, SmallerCWinsEqualGamma) {
  const std::vector<LoocvScore> s{score(100, 0.5, 0.8), score(1, 0.5, 0.8)};
  const auto [chosen, trace] = select_best(s, grid_of(s));
  EXPECT_EQ(chosen, (ModelParams{1, 0.5}));
  EXPECT_EQ(trace.resolved_by, TieBreak::kC);
}

TEST(SelectBest, UniqueMaximumIgnoresParameters) {
  const std::vector<LoocvScore> s{score(0.01, 0.001, 0.7), score(1e4, 100, 0.9),
                                  score(1, 1, 0.85)};
  const auto [chosen, trace] = select_best(s, grid_of(s));
  EXPECT_EQ(chosen, (ModelParams{1e4, 100}));
  EXPECT_EQ(trace.resolved_by, TieBreak::kUnique);
  EXPECT_EQ(trace.tied.size(), 1u);
}

TEST(SelectBest, EmptyOrMismatchedScoresThrow) {
  EXPECT_THROW(select_best({}, ModelGrid{}), UsageError);
  const std::vector<LoocvScore> s{score(1, 1, 0.5)};
  ModelGrid g;
  g.models = {{2, 2}};
  EXPECT_THROW(select_best(s, g), UsageError);
}

TEST(SelectBest, PermutingTheGridNeverChangesTheChoice) {
  std::mt19937_64 gen(12);
  const auto grid = ModelGrid::standard(4);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<LoocvScore> s;
    for (const auto& m : grid.models) s.push_back(score(m.C, m.gamma, (gen() % 4) / 4.0));
    const auto reference = select_best(s, grid_of(s)).first;
    std::shuffle(s.begin(), s.end(), gen);
    EXPECT_EQ(select_best(s, grid_of(s)).first, reference);
  }
}

TEST(Cutoffs, MediansPerPredictedClass) {
  const auto [d0, d1] = compute_cutoffs(well_model(), cutoff_example());
  EXPECT_NEAR(d0, 0.5, 1e-12);
  EXPECT_NEAR(d1, 0.3, 1e-12);
}

TEST(Cutoffs, EmptyPredictedClassIsInfinite) {
  const Dataset far(1, {with_value(0, -0.2), with_value(1, -0.6)});
  const auto [d0, d1] = compute_cutoffs(well_model(), far);
  EXPECT_NEAR(d0, 0.4, 1e-12);
  EXPECT_EQ(d1, kInf);
}

TEST(Weights, AboveOrAtCutoffGetsW) {
  const auto d = Dataset(1, {with_value(0, -0.6), with_value(1, -0.4), with_value(2, 0.3)});
  const auto wa = assign_weights(well_model(), d, {0.5, 0.3}, 1.5);
  EXPECT_EQ(wa.weights, (std::vector<double>{1.5, 1.0, 1.5}));
  EXPECT_EQ(wa.predicted[2], ClassLabel::kOne);
  EXPECT_EQ(wa.weighted_count(), 2u);
}

TEST(Weights, UnitWeightAndInvalidWeight) {
  const auto wa = assign_weights(well_model(), cutoff_example(), {0.0, 0.0}, 1.0);
  for (double w : wa.weights) EXPECT_EQ(w, 1.0);
  EXPECT_THROW(assign_weights(well_model(), cutoff_example(), {0.5, 0.3}, 0.99), UsageError);
}

TEST(Weights, InvariantUnderMonotoneRescalingOfDistances) {
  const auto d = cutoff_example();
  auto scaled = well_model();
  for (auto& c : scaled.dual_coefs) c *= 7.5;
  scaled.bias *= 7.5;
  const auto a = assign_weights(well_model(), d, compute_cutoffs(well_model(), d), 1.5);
  const auto b = assign_weights(scaled, d, compute_cutoffs(scaled, d), 1.5);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.predicted, b.predicted);
}

struct Pipeline {
  Dataset init;
  Dataset pool;
  Dataset all;
};

Pipeline noisy(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto all = testing::gaussian_blobs(gen, 40, 1.5, 1.0);
  SeededRng rng(seed);
  auto split = stratified_initial_sample(all, 2, rng);
  return {split.selected, split.rest, all};
}

TEST(WeightedLoocv, FormulaMatchesFoldsAndWeights) {
  const auto p = noisy(3);
  const auto grid = ModelGrid::standard(2);
  SimulatedOracle oracle(p.all);
  SeededRng rng(0);
  const auto run = run_active_learning(p.init, p.pool, grid.default_model(), 16,
                                       AcquisitionStrategy::kMargin, oracle, {}, rng);
  const auto& train = run.final_training_set;
  const auto fixed = train_svc(train, grid.default_model());
  const auto wa = assign_weights(fixed, train, compute_cutoffs(fixed, train), 2.0);
  const auto plain = loocv_accuracy(train, grid.default_model());
  const auto weighted = weighted_loocv_accuracy(train, grid.default_model(), wa);
  EXPECT_EQ(weighted.fold_correct, plain.fold_correct);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < train.size(); ++j) {
    den += wa.weights[j];
    if (plain.fold_correct[j]) num += wa.weights[j];
  }
  EXPECT_NEAR(weighted.accuracy, num / den, 1e-12);
  EXPECT_TRUE(weighted.weighted);

  const auto ones = assign_weights(fixed, train, compute_cutoffs(fixed, train), 1.0);
  EXPECT_EQ(weighted_loocv_accuracy(train, grid.default_model(), ones).accuracy,
            plain.accuracy);
}

TEST(WeightedLoocv, ArithmeticOfTheDeclaredFormula) {
  // weights {1, 1, 2} over folds {right, wrong, right}: (1 + 2) / 4
  const Dataset d(1, {{0, {0.0}, ClassLabel::kZero},
                      {1, {0.1}, ClassLabel::kZero},
                      {2, {5.0}, ClassLabel::kOne},
                      {3, {5.1}, ClassLabel::kOne},
                      {4, {5.05}, ClassLabel::kZero}});
  const ModelParams p{1.0, 1.0};
  const auto plain = loocv_accuracy(d, p);
  // the class-0 point inside the class-1 pair is always misclassified
  ASSERT_FALSE(plain.fold_correct[4]);
  WeightAssignment wa;
  wa.w = 2.0;
  wa.weights = {1.0, 1.0, 1.0, 1.0, 1.0};
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (plain.fold_correct[j]) num += wa.weights[j];
    den += wa.weights[j];
  }
  EXPECT_NEAR(weighted_loocv_accuracy(d, p, wa).accuracy, num / den, 1e-12);
  wa.weights = {2.0, 1.0, 1.0, 1.0, 1.0};
  den += 1.0;
  if (plain.fold_correct[0]) num += 1.0;
  EXPECT_NEAR(weighted_loocv_accuracy(d, p, wa).accuracy, num / den, 1e-12);
}

TEST(WeightedLoocv, AllFoldsCorrectScoresOneForAnyWeights) {
  const Dataset d(1, {{0, {0.0}, ClassLabel::kZero},
                      {1, {0.1}, ClassLabel::kZero},
                      {2, {5.0}, ClassLabel::kOne},
                      {3, {5.1}, ClassLabel::kOne}});
  WeightAssignment wa;
  wa.w = 3.0;
  wa.weights = {3.0, 1.0, 3.0, 1.0};
  EXPECT_DOUBLE_EQ(weighted_loocv_accuracy(d, {1.0, 1.0}, wa).accuracy, 1.0);
}

TEST(Palms, SingletonGridChoosesDefault) {
  const auto p = noisy(5);
  ModelGrid g;
  g.models = {{1.0, 0.5}};
  SimulatedOracle oracle(p.all);
  SeededRng rng(0);
  const auto out = run_palms(p.init, p.pool, 10, g, oracle, {}, rng);
  EXPECT_EQ(out.report.chosen, (ModelParams{1.0, 0.5}));
  EXPECT_EQ(out.model.params, out.report.chosen);
}

TEST(Palms, ZeroBudgetSelectsOnTheInit) {
  const auto p = noisy(6);
  const auto g = ModelGrid::standard(2);
  SimulatedOracle oracle(p.all);
  SeededRng rng(0);
  const auto out = run_palms(p.init, p.pool, 0, g, oracle, {}, rng);
  EXPECT_EQ(out.run.final_training_set.size(), 4u);
  ASSERT_EQ(out.report.scores.size(), g.models.size());
  for (const auto& s : out.report.scores) EXPECT_EQ(s.fold_correct.size(), 4u);
  EXPECT_FALSE(out.report.weight_assignment.has_value());
}

TEST(PalmsFwc, UnitWeightReducesToPalms) {
  const auto g = ModelGrid::standard(2);
  for (std::uint64_t seed = 10; seed < 16; ++seed) {
    const auto p = noisy(seed);
    SimulatedOracle oracle(p.all);
    SeededRng r1(seed);
    SeededRng r2(seed);
    const auto a = run_palms(p.init, p.pool, 12, g, oracle, {}, r1);
    const auto b = run_palms_fwc(p.init, p.pool, 12, g, 1.0, oracle, {}, r2);
    EXPECT_EQ(a.report.chosen, b.report.chosen);
    ASSERT_EQ(a.report.scores.size(), b.report.scores.size());
    for (std::size_t k = 0; k < a.report.scores.size(); ++k) {
      EXPECT_EQ(a.report.scores[k].accuracy, b.report.scores[k].accuracy);
    }
    EXPECT_TRUE(b.report.weight_assignment.has_value());
  }
}

TEST(PalmsFwc, OnlyTheDefaultScoreDependsOnW) {
  const auto g = ModelGrid::standard(2);
  const auto p = noisy(21);
  SimulatedOracle oracle(p.all);
  SeededRng rng(0);
  const auto run = run_active_learning(p.init, p.pool, g.default_model(), 20,
                                       AcquisitionStrategy::kMargin, oracle, {}, rng);
  const auto& train = run.final_training_set;
  const auto base = select_model(train, g, SelectionMethod::kPalms, 1.0);
  double prev = -1.0;
  for (double w : {1.0, 1.5, 3.0, 10.0}) {
    const auto r = select_model(train, g, SelectionMethod::kPalmsFwc, w);
    for (std::size_t k = 0; k < g.models.size(); ++k) {
      if (k == g.default_index) continue;
      EXPECT_EQ(r.scores[k].accuracy, base.scores[k].accuracy);
    }
    // the weighted score moves monotonically toward the above-cutoff correct fraction
    const double s = r.scores[g.default_index].accuracy;
    if (prev >= 0.0) {
      const auto& dflt = r.scores[g.default_index];
      double hi = 0.0;
      double hi_n = 0.0;
      for (std::size_t j = 0; j < train.size(); ++j) {
        if (dflt.weights[j] > 1.0) {
          hi_n += 1.0;
          if (dflt.fold_correct[j]) hi += 1.0;
        }
      }
      if (hi_n > 0.0) {
        const double target = hi / hi_n;
        EXPECT_LE(std::abs(s - target), std::abs(prev - target) + 1e-12);
      }
    }
    prev = s;
  }
}

}  // namespace
}  // namespace palms
