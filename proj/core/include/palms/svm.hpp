#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "palms/dataset.hpp"

namespace palms {

/// A (C, gamma) hyperparameter pair for the RBF support-vector classifier.
struct ModelParams {
  double C = 1.0;
  double gamma = 1.0;

  /// Throws UsageError unless both values are positive and finite.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct SolverSettings {
  double kkt_tolerance = 1e-3;
  /// Pair updates allowed before the solver gives up.
  std::size_t max_updates = 100000;
  double numerical_epsilon = 1e-12;

  void validate() const;
};

/// Fitted dual-form classifier: f(x) = sum_i coef_i K(sv_i, x) + bias, where
/// coef_i = alpha_i * y_i with y in {-1, +1}. Only alpha_i > 0 are kept.
struct TrainedSvm {
  ModelParams params;
  std::size_t n_features = 0;
  std::vector<FeatureVector> support_vectors;
  std::vector<PointId> support_ids;
  std::vector<double> dual_coefs;
  double bias = 0.0;
  std::size_t training_size = 0;

  // solver diagnostics
  std::size_t iterations = 0;
  double kkt_gap = 0.0;
  std::size_t free_support_count = 0;

  double alpha(std::size_t k) const { return dual_coefs[k] < 0 ? -dual_coefs[k] : dual_coefs[k]; }
};

/// exp(-gamma * |a - b|^2). Throws DataError on a length mismatch.
double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Solves the soft-margin dual by two-variable updates with maximal-violating-pair
/// working set selection. Throws DataError if a class is missing and SolverError
/// if the update budget runs out before the KKT gap drops below tolerance.
TrainedSvm train_svc(const Dataset& train, const ModelParams& params,
                     const SolverSettings& settings = {});

double decision_value(const TrainedSvm& model, std::span<const double> x);
/// Sign rule; f(x) == 0 maps to label 0.
ClassLabel predict(const TrainedSvm& model, std::span<const double> x);
/// |f(x)|, the boundary-distance surrogate used for acquisition and weighting.
double boundary_distance(const TrainedSvm& model, std::span<const double> x);
inline ClassLabel label_for_value(double f) noexcept {
  return f > 0.0 ? ClassLabel::kOne : ClassLabel::kZero;
}

/// Fraction of points whose predicted label equals the true label.
double accuracy(const TrainedSvm& model, const Dataset& data);

/// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
double dual_objective(const TrainedSvm& model);

namespace detail {

/// Dense dual solve on a precomputed kernel matrix (row-major n x n).
struct DualSolution {
  std::vector<double> alpha;
  double bias = 0.0;
  std::size_t iterations = 0;
  double kkt_gap = 0.0;
  std::size_t free_count = 0;
};

DualSolution solve_dual(std::span<const double> kernel, std::span<const int> signs, double C,
                        const SolverSettings& settings);

}  // namespace detail

}  // namespace palms
