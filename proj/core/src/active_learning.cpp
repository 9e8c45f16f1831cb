#include "palms/active_learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace palms {

SimulatedOracle::SimulatedOracle(const Dataset& truth) {
  table_.reserve(truth.size());
  for (const auto& p : truth) table_.emplace_back(p.id, p.y);
  std::sort(table_.begin(), table_.end());
}

ClassLabel SimulatedOracle::label(PointId id) {
  const auto it = std::lower_bound(table_.begin(), table_.end(), id,
                                   [](const auto& e, PointId v) { return e.first < v; });
  if (it == table_.end() || it->first != id) {
    throw DataError("oracle has no label for point " + std::to_string(id));
  }
  return it->second;
}

ScriptedOracle::ScriptedOracle(std::vector<std::pair<PointId, ClassLabel>> answers)
    : answers_(std::move(answers)) {}

ClassLabel ScriptedOracle::label(PointId id) {
  for (const auto& [pid, y] : answers_) {
    if (pid == id) return y;
  }
  throw DataError("scripted oracle has no answer for point " + std::to_string(id));
}

Dataset ActiveRunRecord::training_prefix(std::size_t n_queries) const {
  return final_training_set.prefix(initial.size() + std::min(n_queries, queries.size()));
}

namespace {

// Position of the untaken pool point with the smallest |f|; ties to the smaller id.
std::size_t acquire_position(const TrainedSvm& model, const Dataset& pool,
                             const std::vector<char>* taken, double* distance) {
  std::size_t best_pos = pool.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (taken && (*taken)[i]) continue;
    const double d = boundary_distance(model, pool[i].x);
    if (best_pos == pool.size() || d < best || (d == best && pool[i].id < pool[best_pos].id)) {
      best = d;
      best_pos = i;
    }
  }
  if (distance) *distance = best;
  return best_pos;
}

}  // namespace

PointId acquire_next(const TrainedSvm& model, const Dataset& pool) {
  if (pool.empty()) throw DataError("cannot acquire from an empty pool");
  return pool[acquire_position(model, pool, nullptr, nullptr)].id;
}

ActiveRunRecord run_active_learning(const Dataset& init, const Dataset& pool,
                                    const ModelParams& fixed, std::size_t budget,
                                    AcquisitionStrategy strategy, LabelOracle& oracle,
                                    const SolverSettings& settings, SeededRng& rng) {
  fixed.validate();
  if (init.count(ClassLabel::kZero) == 0 || init.count(ClassLabel::kOne) == 0) {
    throw DataError("initial sample must contain both classes");
  }
  ActiveRunRecord rec;
  rec.initial = init;
  rec.fixed_model = fixed;
  rec.strategy = strategy;
  rec.requested_budget = budget;
  rec.budget_capped = budget > pool.size();
  const std::size_t steps = std::min(budget, pool.size());

  // Pool labels are placeholders for the learner; only oracle answers enter T.
  std::vector<LabeledPoint> training(init.begin(), init.end());
  std::vector<char> taken(pool.size(), 0);

  std::vector<std::size_t> random_order;
  if (strategy == AcquisitionStrategy::kUniformRandom) {
    random_order = rng.sample_without_replacement(pool.size(), steps);
  }

  for (std::size_t step = 0; step < steps; ++step) {
    std::size_t pos;
    double distance = std::numeric_limits<double>::quiet_NaN();
    if (strategy == AcquisitionStrategy::kMargin) {
      const auto model = train_svc(Dataset(init.n_features(), training), fixed, settings);
      pos = acquire_position(model, pool, &taken, &distance);
    } else {
      pos = random_order[step];
    }
    const PointId id = pool[pos].id;
    ClassLabel y;
    try {
      y = oracle.label(id);
    } catch (const std::exception& e) {
      rec.final_training_set = Dataset(init.n_features(), training);
      throw OracleFailure(std::string("oracle failed at step ") + std::to_string(step) + ": " +
                              e.what(),
                          std::move(rec));
    }
    training.push_back({id, pool[pos].x, y});
    taken[pos] = 1;
    rec.queries.push_back({step, id, distance, y});
  }
  rec.final_training_set = Dataset(init.n_features(), std::move(training));
  return rec;
}

}  // namespace palms
