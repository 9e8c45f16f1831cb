#include "palms/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "palms/error.hpp"

namespace palms {

void ModelGrid::validate() const {
  if (models.empty()) throw UsageError("model grid is empty");
  if (default_index >= models.size()) throw UsageError("default model index outside the grid");
  std::set<std::pair<double, double>> seen;
  for (const auto& m : models) {
    m.validate();
    if (!seen.emplace(m.C, m.gamma).second) {
      std::ostringstream msg;
      msg << "duplicate grid model (C=" << m.C << ", gamma=" << m.gamma << ")";
      throw UsageError(msg.str());
    }
  }
}

ModelGrid ModelGrid::product(const std::vector<double>& c_values,
                             const std::vector<double>& gamma_factors, double gamma_scale,
                             const ModelParams& default_model) {
  ModelGrid grid;
  for (double c : c_values) {
    for (double g : gamma_factors) grid.models.push_back({c, g * gamma_scale});
  }
  const auto it = std::find(grid.models.begin(), grid.models.end(), default_model);
  if (it == grid.models.end()) throw UsageError("default model is not on the grid");
  grid.default_index = static_cast<std::size_t>(it - grid.models.begin());
  grid.validate();
  return grid;
}

ModelGrid ModelGrid::standard(std::size_t n_features) {
  if (n_features == 0) throw UsageError("n_features must be positive");
  const double inv_n = 1.0 / static_cast<double>(n_features);
  return product({0.01, 1.0, 100.0, 1e4}, {1e-4, 1e-2, 1.0, 1e2, 1e4}, inv_n, {1.0, inv_n});
}

std::size_t WeightAssignment::weighted_count() const {
  return static_cast<std::size_t>(
      std::count_if(weights.begin(), weights.end(), [](double v) { return v != 1.0; }));
}

const char* to_string(SelectionMethod m) noexcept {
  return m == SelectionMethod::kPalms ? "PALMS" : "PALMS_FWC";
}

const char* to_string(TieBreak t) noexcept {
  switch (t) {
    case TieBreak::kUnique:
      return "unique";
    case TieBreak::kGamma:
      return "gamma";
    case TieBreak::kC:
      return "C";
  }
  return "unique";
}

namespace {

std::vector<double> pairwise_sq_distances(const Dataset& train) {
  const std::size_t n = train.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double v = squared_distance(train[i].x, train[j].x);
      d[i * n + j] = v;
      d[j * n + i] = v;
    }
  }
  return d;
}

void check_loocv_feasible(const Dataset& train) {
  if (train.size() < 3) {
    throw DataError("LOOCV needs at least 3 labeled points, got " + std::to_string(train.size()));
  }
  if (train.count(ClassLabel::kZero) < 2 || train.count(ClassLabel::kOne) < 2) {
    throw DataError(
        "LOOCV needs at least 2 labeled points of each class so that every fold keeps both "
        "classes");
  }
}

// Fold correctness with the kernel built once from cached squared distances.
std::vector<bool> fold_correctness(const Dataset& train, const std::vector<double>& sq_dist,
                                   const ModelParams& model, const SolverSettings& settings) {
  model.validate();
  const std::size_t n = train.size();
  std::vector<double> full(n * n);
  for (std::size_t k = 0; k < n * n; ++k) full[k] = std::exp(-model.gamma * sq_dist[k]);

  std::vector<bool> correct(n, false);
  std::vector<double> sub((n - 1) * (n - 1));
  std::vector<int> signs(n - 1);
  std::vector<std::size_t> keep(n - 1);
  for (std::size_t held = 0; held < n; ++held) {
    for (std::size_t i = 0, r = 0; i < n; ++i) {
      if (i != held) keep[r++] = i;
    }
    for (std::size_t r = 0; r < n - 1; ++r) {
      signs[r] = to_sign(train[keep[r]].y);
      for (std::size_t c = 0; c < n - 1; ++c) sub[r * (n - 1) + c] = full[keep[r] * n + keep[c]];
    }
    detail::DualSolution sol;
    try {
      sol = detail::solve_dual(sub, signs, model.C, settings);
    } catch (const SolverError& e) {
      std::ostringstream msg;
      msg << "LOOCV fold " << held << " (C=" << model.C << ", gamma=" << model.gamma
          << "): " << e.what();
      throw SolverError(msg.str());
    }
    double f = sol.bias;
    for (std::size_t r = 0; r < n - 1; ++r) {
      if (sol.alpha[r] > 0.0) f += sol.alpha[r] * signs[r] * full[keep[r] * n + held];
    }
    correct[held] = label_for_value(f) == train[held].y;
  }
  return correct;
}

LoocvScore unweighted_score(const Dataset& train, const std::vector<double>& sq_dist,
                            const ModelParams& model, const SolverSettings& settings) {
  LoocvScore s;
  s.model = model;
  s.fold_correct = fold_correctness(train, sq_dist, model, settings);
  const auto hits = std::count(s.fold_correct.begin(), s.fold_correct.end(), true);
  s.accuracy = static_cast<double>(hits) / static_cast<double>(train.size());
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

LoocvScore loocv_accuracy(const Dataset& train, const ModelParams& model,
                          const SolverSettings& settings) {
  check_loocv_feasible(train);
  return unweighted_score(train, pairwise_sq_distances(train), model, settings);
}

LoocvScore weighted_loocv_accuracy(const Dataset& train, const ModelParams& model,
                                   const WeightAssignment& weights,
                                   const SolverSettings& settings) {
  check_loocv_feasible(train);
  if (weights.weights.size() != train.size()) {
    throw UsageError("weight vector does not match the training set");
  }
  LoocvScore s;
  s.model = model;
  s.weighted = true;
  s.weights = weights.weights;
  s.fold_correct = fold_correctness(train, pairwise_sq_distances(train), model, settings);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < train.size(); ++j) {
    den += s.weights[j];
    if (s.fold_correct[j]) num += s.weights[j];
  }
  s.accuracy = num / den;
  return s;
}

std::pair<ModelParams, TieTrace> select_best(const std::vector<LoocvScore>& scores,
                                             const ModelGrid& grid) {
  grid.validate();
  if (scores.size() != grid.models.size()) {
    throw UsageError("scores do not cover the model grid");
  }
  std::vector<const LoocvScore*> by_grid;
  for (const auto& m : grid.models) {
    const auto it = std::find_if(scores.begin(), scores.end(),
                                 [&](const LoocvScore& s) { return s.model == m; });
    if (it == scores.end()) throw UsageError("a grid model has no LOOCV score");
    by_grid.push_back(&*it);
  }
  const auto better = [](const LoocvScore* a, const LoocvScore* b) {
    if (a->accuracy != b->accuracy) return a->accuracy > b->accuracy;
    if (a->model.gamma != b->model.gamma) return a->model.gamma < b->model.gamma;
    return a->model.C < b->model.C;
  };
  const LoocvScore* best = *std::min_element(by_grid.begin(), by_grid.end(), better);

  TieTrace trace;
  for (const auto* s : by_grid) {
    if (s->accuracy == best->accuracy) trace.tied.push_back(s->model);
  }
  if (trace.tied.size() > 1) {
    const auto same_gamma = std::count_if(trace.tied.begin(), trace.tied.end(), [&](const auto& m) {
      return m.gamma == best->model.gamma;
    });
    trace.resolved_by = same_gamma > 1 ? TieBreak::kC : TieBreak::kGamma;
  }
  return {best->model, trace};
}

std::pair<double, double> compute_cutoffs(const TrainedSvm& fixed_model, const Dataset& train) {
  std::vector<double> side0;
  std::vector<double> side1;
  for (const auto& p : train) {
    const double f = decision_value(fixed_model, p.x);
    (label_for_value(f) == ClassLabel::kOne ? side1 : side0).push_back(std::abs(f));
  }
  const double inf = std::numeric_limits<double>::infinity();
  return {side0.empty() ? inf : median(side0), side1.empty() ? inf : median(side1)};
}

WeightAssignment assign_weights(const TrainedSvm& fixed_model, const Dataset& train,
                                std::pair<double, double> cutoffs, double w) {
  if (!(w >= 1.0) || !std::isfinite(w)) throw UsageError("weight w must be finite and >= 1");
  WeightAssignment wa;
  wa.cutoff0 = cutoffs.first;
  wa.cutoff1 = cutoffs.second;
  wa.w = w;
  for (const auto& p : train) {
    const double f = decision_value(fixed_model, p.x);
    const ClassLabel yhat = label_for_value(f);
    const double d = std::abs(f);
    const double cut = yhat == ClassLabel::kZero ? wa.cutoff0 : wa.cutoff1;
    wa.predicted.push_back(yhat);
    wa.distances.push_back(d);
    wa.weights.push_back(d >= cut ? w : 1.0);
  }
  return wa;
}

std::vector<LoocvScore> score_grid(const Dataset& train, const ModelGrid& grid,
                                   const SolverSettings& settings) {
  grid.validate();
  check_loocv_feasible(train);
  const auto sq = pairwise_sq_distances(train);
  std::vector<LoocvScore> scores;
  scores.reserve(grid.models.size());
  for (const auto& m : grid.models) scores.push_back(unweighted_score(train, sq, m, settings));
  return scores;
}

SelectionReport select_model(const Dataset& train, const ModelGrid& grid, SelectionMethod method,
                             double w, const SolverSettings& settings,
                             const std::vector<LoocvScore>* precomputed) {
  SelectionReport report;
  report.method = method;
  report.scores = precomputed ? *precomputed : score_grid(train, grid, settings);
  if (method == SelectionMethod::kPalmsFwc) {
    const auto& fixed = grid.default_model();
    const auto fixed_model = train_svc(train, fixed, settings);
    auto wa = assign_weights(fixed_model, train, compute_cutoffs(fixed_model, train), w);
    report.scores[grid.default_index] = weighted_loocv_accuracy(train, fixed, wa, settings);
    report.weight_assignment = std::move(wa);
  }
  auto [chosen, trace] = select_best(report.scores, grid);
  report.chosen = chosen;
  report.tie_trace = std::move(trace);
  return report;
}

namespace {

PalmsOutcome run_selection_pipeline(const Dataset& init, const Dataset& pool, std::size_t budget,
                                    const ModelGrid& grid, SelectionMethod method, double w,
                                    LabelOracle& oracle, const SolverSettings& settings,
                                    SeededRng& rng) {
  grid.validate();
  PalmsOutcome out;
  out.run = run_active_learning(init, pool, grid.default_model(), budget,
                                AcquisitionStrategy::kMargin, oracle, settings, rng);
  out.report = select_model(out.run.final_training_set, grid, method, w, settings);
  out.model = train_svc(out.run.final_training_set, out.report.chosen, settings);
  return out;
}

}  // namespace

PalmsOutcome run_palms(const Dataset& init, const Dataset& pool, std::size_t budget,
                       const ModelGrid& grid, LabelOracle& oracle, const SolverSettings& settings,
                       SeededRng& rng) {
  return run_selection_pipeline(init, pool, budget, grid, SelectionMethod::kPalms, 1.0, oracle,
                                settings, rng);
}

PalmsOutcome run_palms_fwc(const Dataset& init, const Dataset& pool, std::size_t budget,
                           const ModelGrid& grid, double w, LabelOracle& oracle,
                           const SolverSettings& settings, SeededRng& rng) {
  if (!(w >= 1.0)) throw UsageError("weight w must be >= 1");
  return run_selection_pipeline(init, pool, budget, grid, SelectionMethod::kPalmsFwc, w, oracle,
                                settings, rng);
}

}  // namespace palms
