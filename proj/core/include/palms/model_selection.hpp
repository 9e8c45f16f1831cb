#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "palms/active_learning.hpp"
#include "palms/dataset.hpp"
#include "palms/svm.hpp"

namespace palms {

/// Candidate models for selection. The default (fixed) model is a member.
struct ModelGrid {
  std::vector<ModelParams> models;
  std::size_t default_index = 0;

  /// Throws UsageError on an empty grid, duplicates, or a bad default index.
  void validate() const;
  const ModelParams& default_model() const { return models.at(default_index); }

  /// Every (C, gamma) combination; gamma values are multiplied by gamma_scale.
  /// The default must appear in the product.
  static ModelGrid product(const std::vector<double>& c_values,
                           const std::vector<double>& gamma_factors, double gamma_scale,
                           const ModelParams& default_model);
  /// C in {0.01, 1, 100, 1e4}, gamma in (1/n){1e-4, 1e-2, 1, 1e2, 1e4},
  /// default (C=1, gamma=1/n).
  static ModelGrid standard(std::size_t n_features);
};

struct LoocvScore {
  ModelParams model;
  double accuracy = 0.0;
  bool weighted = false;
  /// fold_correct[j]: the model trained without point j classifies it correctly.
  std::vector<bool> fold_correct;
  /// Per-fold weights; empty for unweighted scores.
  std::vector<double> weights;
};

struct WeightAssignment {
  double cutoff0 = 0.0;  ///< median |f| among points predicted 0 (+inf if none)
  double cutoff1 = 0.0;  ///< median |f| among points predicted 1 (+inf if none)
  double w = 1.0;
  std::vector<double> weights;
  std::vector<double> distances;
  std::vector<ClassLabel> predicted;

  std::size_t weighted_count() const;
};

enum class SelectionMethod { kPalms, kPalmsFwc };

const char* to_string(SelectionMethod m) noexcept;

enum class TieBreak { kUnique, kGamma, kC };

const char* to_string(TieBreak t) noexcept;

struct TieTrace {
  std::vector<ModelParams> tied;  ///< models sharing the top score, in grid order
  TieBreak resolved_by = TieBreak::kUnique;
};

struct SelectionReport {
  SelectionMethod method = SelectionMethod::kPalms;
  std::vector<LoocvScore> scores;  ///< grid order
  ModelParams chosen;
  TieTrace tie_trace;
  std::optional<WeightAssignment> weight_assignment;
};

/// Plain LOOCV accuracy. Requires |train| >= 3 and both classes present in every
/// fold's remainder; throws DataError otherwise. Solver failures are rethrown
/// with the fold index.
LoocvScore loocv_accuracy(const Dataset& train, const ModelParams& model,
                          const SolverSettings& settings = {});

/// sum_j w_j [correct_j] / sum_j w_j with weights fixed up front.
LoocvScore weighted_loocv_accuracy(const Dataset& train, const ModelParams& model,
                                   const WeightAssignment& weights,
                                   const SolverSettings& settings = {});

/// Orders by accuracy (desc), gamma (asc), C (asc). Scores must cover the grid.
std::pair<ModelParams, TieTrace> select_best(const std::vector<LoocvScore>& scores,
                                             const ModelGrid& grid);

/// Per-predicted-class median distance; even counts use the central midpoint.
std::pair<double, double> compute_cutoffs(const TrainedSvm& fixed_model, const Dataset& train);

/// w_j = w when |f(x_j)| >= cutoff of its predicted class, else 1. Throws
/// UsageError for w < 1.
WeightAssignment assign_weights(const TrainedSvm& fixed_model, const Dataset& train,
                                std::pair<double, double> cutoffs, double w);

/// Unweighted LOOCV for every grid model, grid order.
std::vector<LoocvScore> score_grid(const Dataset& train, const ModelGrid& grid,
                                   const SolverSettings& settings = {});

/// Model selection on a labeled set. For kPalmsFwc the fixed model is trained on
/// `train`, weights are assigned once, and only the default model's score is
/// replaced by its weighted LOOCV. `precomputed` may carry unweighted grid
/// scores for the same train set to avoid recomputation.
SelectionReport select_model(const Dataset& train, const ModelGrid& grid,
                             SelectionMethod method, double w,
                             const SolverSettings& settings = {},
                             const std::vector<LoocvScore>* precomputed = nullptr);

struct PalmsOutcome {
  SelectionReport report;
  ActiveRunRecord run;
  TrainedSvm model;
};

/// Active learning with the grid's default model, LOOCV selection on the
/// resulting set, and a final fit of the chosen model.
PalmsOutcome run_palms(const Dataset& init, const Dataset& pool, std::size_t budget,
                       const ModelGrid& grid, LabelOracle& oracle,
                       const SolverSettings& settings, SeededRng& rng);

/// As run_palms with the weight-corrected default-model score.
PalmsOutcome run_palms_fwc(const Dataset& init, const Dataset& pool, std::size_t budget,
                           const ModelGrid& grid, double w, LabelOracle& oracle,
                           const SolverSettings& settings, SeededRng& rng);

}  // namespace palms
