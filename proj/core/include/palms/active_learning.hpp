#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "palms/dataset.hpp"
#include "palms/error.hpp"
#include "palms/rng.hpp"
#include "palms/svm.hpp"

namespace palms {

/// Answers label requests by point id. Answers must be stable within a run.
class LabelOracle {
 public:
  virtual ~LabelOracle() = default;
  virtual ClassLabel label(PointId id) = 0;
};

/// Reads held-back true labels.
class SimulatedOracle final : public LabelOracle {
 public:
  explicit SimulatedOracle(const Dataset& truth);
  ClassLabel label(PointId id) override;

 private:
  std::vector<std::pair<PointId, ClassLabel>> table_;  // sorted by id
};

/// Replays a fixed list of answers keyed by id.
class ScriptedOracle final : public LabelOracle {
 public:
  explicit ScriptedOracle(std::vector<std::pair<PointId, ClassLabel>> answers);
  ClassLabel label(PointId id) override;

 private:
  std::vector<std::pair<PointId, ClassLabel>> answers_;
};

enum class AcquisitionStrategy { kMargin, kUniformRandom };

struct QueryRecord {
  std::size_t step = 0;
  PointId id = 0;
  /// |f(x)| under the model trained before the query; NaN for random draws.
  double distance = 0.0;
  ClassLabel label = ClassLabel::kZero;
};

struct ActiveRunRecord {
  Dataset initial;
  std::vector<QueryRecord> queries;
  Dataset final_training_set;
  ModelParams fixed_model;
  AcquisitionStrategy strategy = AcquisitionStrategy::kMargin;
  std::size_t requested_budget = 0;
  /// True when the pool ran out before the requested budget.
  bool budget_capped = false;

  /// The initial set plus the first `n_queries` labeled queries.
  Dataset training_prefix(std::size_t n_queries) const;
};

/// Thrown when the oracle fails mid-run; carries the partial record.
class OracleFailure : public Error {
 public:
  OracleFailure(const std::string& message, ActiveRunRecord partial)
      : Error(ErrorKind::kData, message), partial_(std::move(partial)) {}
  const ActiveRunRecord& partial() const noexcept { return partial_; }

 private:
  ActiveRunRecord partial_;
};

/// Pool id with the smallest |f(x)|; ties go to the smaller id.
PointId acquire_next(const TrainedSvm& model, const Dataset& pool);

/// Margin strategy retrains on T before each acquisition; the random strategy
/// draws uniformly without replacement and never trains. Performs exactly
/// min(budget, |pool|) iterations. Pool labels are never read; labels come from
/// `oracle`.
ActiveRunRecord run_active_learning(const Dataset& init, const Dataset& pool,
                                    const ModelParams& fixed, std::size_t budget,
                                    AcquisitionStrategy strategy, LabelOracle& oracle,
                                    const SolverSettings& settings, SeededRng& rng);

}  // namespace palms
