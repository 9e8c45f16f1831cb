#include "palms/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "palms/active_learning.hpp"
#include "palms/csv.hpp"
#include "palms/error.hpp"
#include "palms/model_selection.hpp"
#include "palms/splits.hpp"
#include "palms/standardizer.hpp"

namespace palms {

const char* to_string(MethodId m) noexcept {
  switch (m) {
    case MethodId::kRandom:
      return "RANDOM";
    case MethodId::kDefault:
      return "DEFAULT";
    case MethodId::kOracle:
      return "ORACLE";
    case MethodId::kPalms:
      return "PALMS";
    case MethodId::kPalmsFwc:
      return "PALMS_FWC";
  }
  return "?";
}

MethodId parse_method(std::string_view name) {
  std::string norm;
  for (char c : name) {
    if (c == ' ') continue;
    norm.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  for (MethodId m : kAllMethods) {
    if (norm == to_string(m)) return m;
  }
  throw UsageError("unknown method '" + std::string(name) + "'");
}

std::vector<MethodId> parse_method_list(std::string_view comma_list) {
  std::vector<MethodId> out;
  std::size_t start = 0;
  while (start <= comma_list.size()) {
    const auto comma = comma_list.find(',', start);
    const auto item = comma_list.substr(start, comma == std::string_view::npos ? comma : comma - start);
    if (!item.empty()) {
      const MethodId m = parse_method(item);
      if (std::find(out.begin(), out.end(), m) != out.end()) {
        throw UsageError("method listed twice: " + std::string(item));
      }
      out.push_back(m);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw UsageError("no methods given");
  return out;
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw UsageError("no methods configured");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (std::find(methods.begin() + static_cast<std::ptrdiff_t>(i) + 1, methods.end(),
                  methods[i]) != methods.end()) {
      throw UsageError("method listed twice");
    }
  }
  if (budget < 1) throw UsageError("budget must be at least 1");
  if (trials < 1) throw UsageError("trials must be at least 1");
  if (stride < 1) throw UsageError("stride must be at least 1");
  if (test_per_class < 1) throw UsageError("test-per-class must be at least 1");
  const bool loocv = has(MethodId::kPalms) || has(MethodId::kPalmsFwc) || has(MethodId::kRandom);
  if (init_per_class < (loocv ? 2u : 1u)) {
    throw UsageError("init-per-class must be at least 2 for LOOCV-based methods");
  }
  if (c_values.empty() || gamma_factors.empty()) throw UsageError("model grid is empty");
  if (std::find(c_values.begin(), c_values.end(), default_c) == c_values.end() ||
      std::find(gamma_factors.begin(), gamma_factors.end(), default_gamma_factor) ==
          gamma_factors.end()) {
    throw UsageError("default model must lie on the grid");
  }
  if (!(weight >= 1.0) || !std::isfinite(weight)) throw UsageError("weight must be >= 1");
  solver.validate();
}

std::vector<std::size_t> ExperimentConfig::evaluated_budgets() const {
  std::vector<std::size_t> out;
  for (std::size_t b = 0; b < budget; b += stride) out.push_back(b);
  out.push_back(budget);
  return out;
}

bool ExperimentConfig::has(MethodId m) const {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.dataset_path == b.dataset_path && a.methods == b.methods && a.budget == b.budget &&
         a.trials == b.trials && a.test_per_class == b.test_per_class &&
         a.init_per_class == b.init_per_class && a.c_values == b.c_values &&
         a.gamma_factors == b.gamma_factors && a.default_c == b.default_c &&
         a.default_gamma_factor == b.default_gamma_factor && a.weight == b.weight &&
         a.base_seed == b.base_seed && a.stride == b.stride &&
         a.oracle_final_budget == b.oracle_final_budget &&
         a.solver.kkt_tolerance == b.solver.kkt_tolerance &&
         a.solver.max_updates == b.solver.max_updates &&
         a.solver.numerical_epsilon == b.solver.numerical_epsilon;
}

bool operator==(const ExperimentResult& a, const ExperimentResult& b) {
  return a.config == b.config && a.n_features == b.n_features &&
         a.dataset_size == b.dataset_size && a.budgets == b.budgets && a.trials == b.trials &&
         a.aggregates == b.aggregates;
}

namespace {

bool model_before(const ModelParams& a, const ModelParams& b) {
  if (a.gamma != b.gamma) return a.gamma < b.gamma;
  return a.C < b.C;
}

double test_accuracy(const Dataset& train, const ModelParams& m, const Dataset& test,
                     const SolverSettings& settings) {
  return accuracy(train_svc(train, m, settings), test);
}

struct Curve {
  std::vector<double> acc;
  ModelParams final_model;
};

// LOOCV selection on each evaluated prefix of one labeled sequence.
Curve selection_curve(const ActiveRunRecord& run, const std::vector<std::size_t>& budgets,
                      const ModelGrid& grid, const Dataset& test, const SolverSettings& settings,
                      std::optional<double> fwc_weight,
                      std::vector<std::vector<LoocvScore>>* score_cache) {
  Curve c;
  for (std::size_t k = 0; k < budgets.size(); ++k) {
    const Dataset train = run.training_prefix(budgets[k]);
    std::vector<LoocvScore> local;
    const std::vector<LoocvScore>* scores = nullptr;
    if (score_cache && k < score_cache->size()) {
      scores = &(*score_cache)[k];
    } else {
      local = score_grid(train, grid, settings);
      if (score_cache) {
        score_cache->push_back(std::move(local));
        scores = &score_cache->back();
      } else {
        scores = &local;
      }
    }
    const auto report =
        select_model(train, grid, fwc_weight ? SelectionMethod::kPalmsFwc : SelectionMethod::kPalms,
                     fwc_weight.value_or(1.0), settings, scores);
    c.acc.push_back(test_accuracy(train, report.chosen, test, settings));
    c.final_model = report.chosen;
  }
  return c;
}

std::vector<double> fixed_curve(const ActiveRunRecord& run, const std::vector<std::size_t>& budgets,
                                const ModelParams& m, const Dataset& test,
                                const SolverSettings& settings) {
  std::vector<double> acc;
  for (std::size_t b : budgets) acc.push_back(test_accuracy(run.training_prefix(b), m, test, settings));
  return acc;
}

}  // namespace

TrialResult run_trial(const Dataset& data, const ExperimentConfig& config,
                      std::size_t trial_index) {
  config.validate();
  TrialResult tr;
  tr.trial = trial_index;
  tr.seed = config.base_seed + trial_index;
  try {
    SeededRng rng(tr.seed);
    const std::size_t n = data.n_features();
    const double inv_n = 1.0 / static_cast<double>(n);
    const ModelGrid grid = ModelGrid::product(config.c_values, config.gamma_factors, inv_n,
                                              {config.default_c, config.default_gamma_factor * inv_n});
    const ModelParams& fixed = grid.default_model();
    const auto& settings = config.solver;

    const auto test_split = stratified_test_split(data, config.test_per_class, rng);
    const auto init_split = stratified_initial_sample(test_split.rest, config.init_per_class, rng);
    const auto scaler = fit_standardizer(test_split.rest);
    const Dataset test = apply_standardizer(scaler, test_split.selected);
    const Dataset init = apply_standardizer(scaler, init_split.selected);
    const Dataset pool = apply_standardizer(scaler, init_split.rest);

    tr.budgets = config.evaluated_budgets();
    const std::size_t reachable = std::min(config.budget, pool.size());
    for (std::size_t b : tr.budgets) tr.labels_used.push_back(init.size() + std::min(b, reachable));

    SimulatedOracle oracle(pool);
    const bool need_margin = config.has(MethodId::kDefault) || config.has(MethodId::kPalms) ||
                             config.has(MethodId::kPalmsFwc) || config.has(MethodId::kOracle);
    std::optional<ActiveRunRecord> margin_run;
    if (need_margin) {
      margin_run = run_active_learning(init, pool, fixed, config.budget,
                                       AcquisitionStrategy::kMargin, oracle, settings, rng);
    }
    std::optional<std::vector<double>> default_curve;
    if (config.has(MethodId::kDefault) || config.has(MethodId::kOracle)) {
      default_curve = fixed_curve(*margin_run, tr.budgets, fixed, test, settings);
    }
    if (config.has(MethodId::kDefault)) {
      tr.curves[MethodId::kDefault] = *default_curve;
      tr.chosen[MethodId::kDefault] = fixed;
    }

    std::vector<std::vector<LoocvScore>> palms_scores;
    if (config.has(MethodId::kPalms)) {
      auto c = selection_curve(*margin_run, tr.budgets, grid, test, settings, std::nullopt,
                               &palms_scores);
      tr.curves[MethodId::kPalms] = std::move(c.acc);
      tr.chosen[MethodId::kPalms] = c.final_model;
    }
    if (config.has(MethodId::kPalmsFwc)) {
      auto c = selection_curve(*margin_run, tr.budgets, grid, test, settings, config.weight,
                               &palms_scores);
      tr.curves[MethodId::kPalmsFwc] = std::move(c.acc);
      tr.chosen[MethodId::kPalmsFwc] = c.final_model;
    }
    if (config.has(MethodId::kRandom)) {
      const auto random_run = run_active_learning(init, pool, fixed, config.budget,
                                                  AcquisitionStrategy::kUniformRandom, oracle,
                                                  settings, rng);
      auto c = selection_curve(random_run, tr.budgets, grid, test, settings, std::nullopt, nullptr);
      tr.curves[MethodId::kRandom] = std::move(c.acc);
      tr.chosen[MethodId::kRandom] = c.final_model;
    }
    if (config.has(MethodId::kOracle)) {
      std::vector<std::vector<double>> per_model;
      for (std::size_t m = 0; m < grid.models.size(); ++m) {
        if (m == grid.default_index) {
          per_model.push_back(*default_curve);
          continue;
        }
        const auto run = run_active_learning(init, pool, grid.models[m], config.budget,
                                             AcquisitionStrategy::kMargin, oracle, settings, rng);
        per_model.push_back(fixed_curve(run, tr.budgets, grid.models[m], test, settings));
      }
      // best model at budget index k; ties prefer smaller gamma, then smaller C
      const auto best_at = [&](std::size_t k) {
        std::size_t best = 0;
        for (std::size_t m = 1; m < grid.models.size(); ++m) {
          const double a = per_model[m][k];
          const double b = per_model[best][k];
          if (a > b || (a == b && model_before(grid.models[m], grid.models[best]))) best = m;
        }
        return best;
      };
      std::vector<double> curve;
      if (config.oracle_final_budget) {
        const std::size_t best = best_at(tr.budgets.size() - 1);
        curve = per_model[best];
        tr.oracle_models.assign(tr.budgets.size(), grid.models[best]);
      } else {
        for (std::size_t k = 0; k < tr.budgets.size(); ++k) {
          const std::size_t best = best_at(k);
          curve.push_back(per_model[best][k]);
          tr.oracle_models.push_back(grid.models[best]);
        }
      }
      tr.curves[MethodId::kOracle] = std::move(curve);
      tr.chosen[MethodId::kOracle] = tr.oracle_models.back();
    }
  } catch (const Error& e) {
    throw Error(e.kind(), "trial " + std::to_string(trial_index) + ": " + e.what());
  }
  return tr;
}

std::map<MethodId, Aggregate> aggregate_trials(const std::vector<TrialResult>& trials,
                                               const std::vector<MethodId>& methods) {
  std::map<MethodId, Aggregate> out;
  if (trials.empty()) return out;
  const double count = static_cast<double>(trials.size());
  for (MethodId m : methods) {
    const std::size_t len = trials.front().curves.at(m).size();
    Aggregate agg;
    agg.mean.assign(len, 0.0);
    agg.stddev.assign(len, 0.0);
    for (std::size_t k = 0; k < len; ++k) {
      double sum = 0.0;
      for (const auto& t : trials) sum += t.curves.at(m)[k];
      const double mean = sum / count;
      double ss = 0.0;
      for (const auto& t : trials) {
        const double d = t.curves.at(m)[k] - mean;
        ss += d * d;
      }
      agg.mean[k] = mean;
      agg.stddev[k] = std::sqrt(ss / count);
    }
    out[m] = std::move(agg);
  }
  return out;
}

ExperimentResult run_experiment(const Dataset& data, const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  result.config = config;
  result.n_features = data.n_features();
  result.dataset_size = data.size();
  result.budgets = config.evaluated_budgets();
  result.trials.resize(config.trials);

  std::vector<std::optional<Error>> failures(config.trials);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t t = next++; t < config.trials; t = next++) {
      try {
        result.trials[t] = run_trial(data, config, t);
      } catch (const Error& e) {
        failures[t] = e;
      } catch (const std::exception& e) {
        failures[t] = Error(ErrorKind::kNumerical, e.what());
      }
    }
  };
  std::size_t workers = config.workers ? config.workers : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, config.trials);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::vector<std::size_t> failed;
  for (std::size_t t = 0; t < failures.size(); ++t) {
    if (failures[t]) failed.push_back(t);
  }
  if (!failed.empty()) {
    std::ostringstream msg;
    msg << failed.size() << " trial(s) failed [";
    for (std::size_t i = 0; i < failed.size(); ++i) msg << (i ? "," : "") << failed[i];
    msg << "]; first: " << failures[failed.front()]->what();
    throw Error(failures[failed.front()]->kind(), msg.str());
  }
  result.aggregates = aggregate_trials(result.trials, config.methods);
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  return run_experiment(load_csv(config.dataset_path), config);
}

}  // namespace palms
