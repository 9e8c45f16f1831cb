#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "palms/dataset.hpp"
#include "palms/model_selection.hpp"
#include "palms/rng.hpp"
#include "palms/standardizer.hpp"
#include "palms/svm.hpp"

namespace palms {

struct SessionConfig {
  /// Uploaded pool (CSV text); any `label` column is discarded.
  std::optional<std::string> pool_csv;
  /// Name of a dataset registered with the SessionStore.
  std::optional<std::string> dataset;
  std::size_t budget = 20;
  /// Defaults to (C=1, gamma=1/n).
  std::optional<ModelParams> fixed_model;
  std::vector<double> c_values{0.01, 1.0, 100.0, 1e4};
  std::vector<double> gamma_factors{1e-4, 1e-2, 1.0, 1e2, 1e4};
  SelectionMethod method = SelectionMethod::kPalmsFwc;
  double weight = 1.5;
  std::uint64_t seed = 0;
  /// Random queries continue until every class has this many labels.
  std::size_t bootstrap_per_class = 2;
  SolverSettings solver;
};

enum class SessionState { kBootstrapping, kAwaitingLabel, kReady, kFinalized, kAborted };
enum class QueryPhase { kBootstrap, kMargin };

const char* to_string(SessionState s) noexcept;
const char* to_string(QueryPhase p) noexcept;

struct Progress {
  std::size_t labels_used = 0;
  std::size_t budget = 0;
  SessionState state = SessionState::kBootstrapping;
  std::optional<QueryPhase> phase;
};

struct PendingQuery {
  PointId id = 0;
  FeatureVector features;  ///< raw, unstandardized values
  QueryPhase phase = QueryPhase::kBootstrap;
  Progress progress;
};

struct PoolPrediction {
  PointId id = 0;
  ClassLabel label = ClassLabel::kZero;
  double decision_value = 0.0;
};

struct SelectionOutcome {
  SelectionReport report;
  std::vector<PointId> training_ids;  ///< labeling order
  std::vector<PoolPrediction> predictions;  ///< every pool point, id order
};

/// One labeling session: bootstrap by random queries until each class has
/// `bootstrap_per_class` labels, then query the point nearest the fixed model's
/// boundary until the budget is spent. Not thread-safe; SessionStore serializes
/// access.
class Session {
 public:
  Session(std::string id, const SessionConfig& config, Dataset raw_pool);

  const std::string& id() const noexcept { return id_; }
  const SessionConfig& config() const noexcept { return config_; }
  SessionState state() const noexcept { return state_; }
  Progress progress() const;
  PendingQuery next_query() const;
  /// Commits fully or throws leaving the session untouched.
  Progress submit_label(PointId point, ClassLabel label);
  const SelectionOutcome& finalize();
  const std::optional<SelectionOutcome>& outcome() const noexcept { return outcome_; }
  void abort();

  /// Standardized training set in labeling order.
  const Dataset& training_set() const noexcept { return training_; }
  /// Standardized unlabeled remainder, id order.
  const Dataset& pool() const noexcept { return pool_; }
  const ModelGrid& grid() const noexcept { return grid_; }
  std::size_t bootstrap_label_count() const noexcept { return bootstrap_labels_; }
  std::size_t labels_in_class(ClassLabel y) const noexcept { return training_.count(y); }
  const std::vector<std::pair<PointId, ClassLabel>>& answers() const noexcept { return answers_; }

 private:
  bool bootstrap_done() const noexcept;
  void plan_next_query();

  std::string id_;
  SessionConfig config_;
  Dataset raw_pool_;
  Standardizer standardizer_;
  Dataset standardized_pool_;
  ModelGrid grid_;
  SeededRng rng_;
  SessionState state_ = SessionState::kBootstrapping;
  Dataset training_;
  Dataset pool_;
  std::optional<PointId> pending_;
  QueryPhase phase_ = QueryPhase::kBootstrap;
  std::size_t bootstrap_labels_ = 0;
  std::vector<std::pair<PointId, ClassLabel>> answers_;
  std::optional<SelectionOutcome> outcome_;
};

/// Thread-safe collection of sessions with an optional append-only event log.
/// When a log directory is given, existing events are replayed on construction
/// so sessions survive restarts.
class SessionStore {
 public:
  explicit SessionStore(std::optional<std::filesystem::path> log_dir = std::nullopt,
                        std::map<std::string, Dataset> datasets = {});

  std::string create(const SessionConfig& config);
  Progress status(const std::string& id) const;
  PendingQuery next_query(const std::string& id) const;
  Progress submit_label(const std::string& id, PointId point, ClassLabel label);
  SelectionOutcome finalize(const std::string& id);
  SelectionOutcome outcome(const std::string& id) const;
  void abort(const std::string& id);
  std::size_t size() const;

  /// Copy of a session's current state (for inspection and tests).
  Session snapshot(const std::string& id) const;

 private:
  struct Entry {
    mutable std::mutex mutex;
    std::unique_ptr<Session> session;
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  Dataset resolve_pool(const SessionConfig& config) const;
  std::string create_with_id(const std::string& id, const SessionConfig& config);
  void append_event(const std::string& line);
  void log_query(const std::string& id, const Session& s);
  void replay(const std::filesystem::path& log_file);

  std::optional<std::filesystem::path> log_file_;
  std::map<std::string, Dataset> datasets_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex log_mutex_;
  bool replaying_ = false;
};

}  // namespace palms
