#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "palms/dataset.hpp"
#include "palms/svm.hpp"

namespace palms {

enum class MethodId { kRandom, kDefault, kOracle, kPalms, kPalmsFwc };

inline constexpr std::array<MethodId, 5> kAllMethods = {
    MethodId::kRandom, MethodId::kDefault, MethodId::kOracle, MethodId::kPalms,
    MethodId::kPalmsFwc};

const char* to_string(MethodId m) noexcept;
/// Accepts RANDOM, DEFAULT, ORACLE, PALMS, PALMS_FWC (case-insensitive, '-' or '_').
MethodId parse_method(std::string_view name);
std::vector<MethodId> parse_method_list(std::string_view comma_list);

struct ExperimentConfig {
  std::string dataset_path;
  std::vector<MethodId> methods{kAllMethods.begin(), kAllMethods.end()};
  std::size_t budget = 55;
  std::size_t trials = 50;
  std::size_t test_per_class = 50;
  std::size_t init_per_class = 2;
  std::vector<double> c_values{0.01, 1.0, 100.0, 1e4};
  /// Multiplied by 1/n_features.
  std::vector<double> gamma_factors{1e-4, 1e-2, 1.0, 1e2, 1e4};
  double default_c = 1.0;
  double default_gamma_factor = 1.0;
  double weight = 1.5;
  std::uint64_t base_seed = 0;
  std::size_t stride = 1;
  /// ORACLE picks one model per trial by final-budget test accuracy instead of
  /// taking the per-budget maximum.
  bool oracle_final_budget = false;
  SolverSettings solver;
  /// Worker threads for trials; 0 = hardware concurrency. Not part of results.
  std::size_t workers = 0;

  void validate() const;
  /// 0, stride, 2*stride, ... and always `budget`.
  std::vector<std::size_t> evaluated_budgets() const;
  bool has(MethodId m) const;
};

struct TrialResult {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> budgets;
  /// Labels consumed at each evaluated budget (init + queries actually made).
  std::vector<std::size_t> labels_used;
  std::map<MethodId, std::vector<double>> curves;
  /// Model used for the final-budget point, per method.
  std::map<MethodId, ModelParams> chosen;
  /// Per evaluated budget, the grid model that attained the ORACLE value.
  std::vector<ModelParams> oracle_models;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

struct Aggregate {
  std::vector<double> mean;
  std::vector<double> stddev;  ///< population standard deviation across trials

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::size_t n_features = 0;
  std::size_t dataset_size = 0;
  std::vector<std::size_t> budgets;
  std::vector<TrialResult> trials;
  std::map<MethodId, Aggregate> aggregates;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);
bool operator==(const ExperimentResult& a, const ExperimentResult& b);

/// One trial: seed = base_seed + trial_index, balanced test split, stratified
/// init, standardization fitted on init + pool, then every configured method.
TrialResult run_trial(const Dataset& data, const ExperimentConfig& config,
                      std::size_t trial_index);

/// All trials plus per-method mean and standard deviation curves. Any failing
/// trial aborts the experiment with an error listing the failed trial indices.
ExperimentResult run_experiment(const Dataset& data, const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config);

std::map<MethodId, Aggregate> aggregate_trials(const std::vector<TrialResult>& trials,
                                               const std::vector<MethodId>& methods);

}  // namespace palms
