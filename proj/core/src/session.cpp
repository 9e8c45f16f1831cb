#include "palms/session.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "palms/active_learning.hpp"
#include "palms/csv.hpp"
#include "palms/error.hpp"
#include "palms/label_api.hpp"

namespace palms {

const char* to_string(SessionState s) noexcept {
  switch (s) {
    case SessionState::kBootstrapping:
      return "bootstrapping";
    case SessionState::kAwaitingLabel:
      return "awaiting_label";
    case SessionState::kReady:
      return "ready";
    case SessionState::kFinalized:
      return "finalized";
    case SessionState::kAborted:
      return "aborted";
  }
  return "?";
}

const char* to_string(QueryPhase p) noexcept {
  return p == QueryPhase::kBootstrap ? "bootstrap" : "margin";
}

namespace {

ModelGrid session_grid(const SessionConfig& c, std::size_t n_features) {
  const double inv_n = 1.0 / static_cast<double>(n_features);
  const ModelParams fixed = c.fixed_model.value_or(ModelParams{1.0, inv_n});
  return ModelGrid::product(c.c_values, c.gamma_factors, inv_n, fixed);
}

}  // namespace

Session::Session(std::string id, const SessionConfig& config, Dataset raw_pool)
    : id_(std::move(id)), config_(config), raw_pool_(std::move(raw_pool)), rng_(config.seed) {
  if (config_.budget < 1) throw UsageError("budget must be at least 1");
  if (config_.bootstrap_per_class < 1) throw UsageError("bootstrap_per_class must be >= 1");
  if (!(config_.weight >= 1.0)) throw UsageError("weight must be >= 1");
  config_.solver.validate();
  if (raw_pool_.empty()) throw DataError("pool is empty");
  grid_ = session_grid(config_, raw_pool_.n_features());
  standardizer_ = fit_standardizer(raw_pool_);
  standardized_pool_ = apply_standardizer(standardizer_, raw_pool_);
  pool_ = standardized_pool_;
  training_ = Dataset(raw_pool_.n_features(), {});
  plan_next_query();
}

bool Session::bootstrap_done() const noexcept {
  return training_.count(ClassLabel::kZero) >= config_.bootstrap_per_class &&
         training_.count(ClassLabel::kOne) >= config_.bootstrap_per_class;
}

void Session::plan_next_query() {
  pending_.reset();
  if (answers_.size() >= config_.budget || pool_.empty()) {
    state_ = SessionState::kReady;
    return;
  }
  if (!bootstrap_done()) {
    phase_ = QueryPhase::kBootstrap;
    pending_ = pool_[static_cast<std::size_t>(rng_.uniform_index(pool_.size()))].id;
    state_ = SessionState::kBootstrapping;
    return;
  }
  phase_ = QueryPhase::kMargin;
  const auto model = train_svc(training_, grid_.default_model(), config_.solver);
  pending_ = acquire_next(model, pool_);
  state_ = SessionState::kAwaitingLabel;
}

Progress Session::progress() const {
  Progress p;
  p.labels_used = answers_.size();
  p.budget = config_.budget;
  p.state = state_;
  if (pending_) p.phase = phase_;
  return p;
}

PendingQuery Session::next_query() const {
  if (state_ == SessionState::kFinalized || state_ == SessionState::kAborted) {
    throw NotFoundError(std::string("session is ") + to_string(state_) + "; no pending query");
  }
  if (!pending_) throw StateError("budget exhausted; finalize the session");
  PendingQuery q;
  q.id = *pending_;
  q.features = raw_pool_[raw_pool_.index_of(*pending_)].x;
  q.phase = phase_;
  q.progress = progress();
  return q;
}

Progress Session::submit_label(PointId point, ClassLabel label) {
  if (state_ == SessionState::kFinalized || state_ == SessionState::kAborted) {
    throw StateError(std::string("session is ") + to_string(state_));
  }
  if (!pending_) throw StateError("label budget already exhausted");
  if (point != *pending_) {
    throw ConflictError("point " + std::to_string(point) + " is not the pending query (" +
                        std::to_string(*pending_) + ")");
  }
  Session next = *this;
  const std::size_t pos = next.pool_.index_of(point);
  next.training_ = next.training_.with_point({point, next.pool_[pos].x, label});
  next.pool_ = next.pool_.without_index(pos);
  next.answers_.emplace_back(point, label);
  if (next.phase_ == QueryPhase::kBootstrap) ++next.bootstrap_labels_;
  next.plan_next_query();
  *this = std::move(next);
  return progress();
}

const SelectionOutcome& Session::finalize() {
  if (state_ == SessionState::kFinalized) return *outcome_;
  if (state_ == SessionState::kAborted) throw StateError("session was aborted");
  if (training_.count(ClassLabel::kZero) < 2 || training_.count(ClassLabel::kOne) < 2) {
    throw StateError(
        "cannot finalize: leave-one-out cross-validation needs at least 2 labeled points of each "
        "class (have " + std::to_string(training_.count(ClassLabel::kZero)) + " of class 0, " +
        std::to_string(training_.count(ClassLabel::kOne)) + " of class 1)");
  }
  SelectionOutcome out;
  out.report = select_model(training_, grid_, config_.method, config_.weight, config_.solver);
  const auto model = train_svc(training_, out.report.chosen, config_.solver);
  out.training_ids = training_.ids();
  for (const auto& p : standardized_pool_) {
    const double f = decision_value(model, p.x);
    out.predictions.push_back({p.id, label_for_value(f), f});
  }
  outcome_ = std::move(out);
  pending_.reset();
  state_ = SessionState::kFinalized;
  return *outcome_;
}

void Session::abort() {
  if (state_ == SessionState::kFinalized || state_ == SessionState::kAborted) {
    throw StateError(std::string("session is already ") + to_string(state_));
  }
  pending_.reset();
  state_ = SessionState::kAborted;
}

// ---------------------------------------------------------------------------

namespace {

using Json = nlohmann::ordered_json;

std::string random_token() {
  std::random_device rd;
  std::array<std::uint32_t, 4> words{rd(), rd(), rd(), rd()};
  char buf[33];
  std::snprintf(buf, sizeof buf, "%08x%08x%08x%08x", words[0], words[1], words[2], words[3]);
  return buf;
}

}  // namespace

SessionStore::SessionStore(std::optional<std::filesystem::path> log_dir,
                           std::map<std::string, Dataset> datasets)
    : datasets_(std::move(datasets)) {
  if (log_dir) {
    std::filesystem::create_directories(*log_dir);
    log_file_ = *log_dir / "sessions.jsonl";
    if (std::filesystem::exists(*log_file_)) replay(*log_file_);
  }
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& id) const {
  std::shared_lock lock(map_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError("unknown session " + id);
  return it->second;
}

Dataset SessionStore::resolve_pool(const SessionConfig& config) const {
  if (config.pool_csv && config.dataset) throw UsageError("give either pool_csv or dataset");
  if (config.pool_csv) return parse_unlabeled_csv(*config.pool_csv);
  if (config.dataset) {
    const auto it = datasets_.find(*config.dataset);
    if (it == datasets_.end()) throw UsageError("unknown server dataset '" + *config.dataset + "'");
    // strip labels: human answers are the only source of truth
    std::vector<LabeledPoint> pts;
    for (const auto& p : it->second) pts.push_back({p.id, p.x, ClassLabel::kZero});
    return Dataset(it->second.n_features(), std::move(pts));
  }
  throw UsageError("session needs a pool (pool_csv or dataset)");
}

std::string SessionStore::create_with_id(const std::string& id, const SessionConfig& config) {
  auto entry = std::make_shared<Entry>();
  entry->session = std::make_unique<Session>(id, config, resolve_pool(config));
  std::unique_lock lock(map_mutex_);
  if (!sessions_.emplace(id, std::move(entry)).second) throw ConflictError("session id collision");
  return id;
}

std::string SessionStore::create(const SessionConfig& config) {
  std::string id = random_token();
  create_with_id(id, config);
  append_event(Json{{"event", "created"},
                    {"session", id},
                    {"config", Json::parse(config_to_json(config))}}
                   .dump());
  log_query(id, snapshot(id));
  return id;
}

Progress SessionStore::status(const std::string& id) const {
  const auto e = find(id);
  std::lock_guard lock(e->mutex);
  return e->session->progress();
}

PendingQuery SessionStore::next_query(const std::string& id) const {
  const auto e = find(id);
  std::lock_guard lock(e->mutex);
  return e->session->next_query();
}

Progress SessionStore::submit_label(const std::string& id, PointId point, ClassLabel label) {
  const auto e = find(id);
  std::lock_guard lock(e->mutex);
  Session next = *e->session;
  const Progress p = next.submit_label(point, label);
  append_event(Json{{"event", "labeled"}, {"session", id}, {"point_id", point},
                    {"label", to_int(label)}}
                   .dump());
  log_query(id, next);
  *e->session = std::move(next);
  return p;
}

SelectionOutcome SessionStore::finalize(const std::string& id) {
  const auto e = find(id);
  std::lock_guard lock(e->mutex);
  if (e->session->state() == SessionState::kFinalized) return *e->session->outcome();
  Session next = *e->session;
  SelectionOutcome out = next.finalize();
  append_event(Json{{"event", "finalized"}, {"session", id}}.dump());
  *e->session = std::move(next);
  return out;
}

SelectionOutcome SessionStore::outcome(const std::string& id) const {
  const auto e = find(id);
  std::lock_guard lock(e->mutex);
  const auto& o = e->session->outcome();
  if (!o) throw NotFoundError("session " + id + " has not been finalized");
  return *o;
}

void SessionStore::abort(const std::string& id) {
  const auto e = find(id);
  std::lock_guard lock(e->mutex);
  Session next = *e->session;
  next.abort();
  append_event(Json{{"event", "aborted"}, {"session", id}}.dump());
  *e->session = std::move(next);
}

std::size_t SessionStore::size() const {
  std::shared_lock lock(map_mutex_);
  return sessions_.size();
}

Session SessionStore::snapshot(const std::string& id) const {
  const auto e = find(id);
  std::lock_guard lock(e->mutex);
  return *e->session;
}

void SessionStore::append_event(const std::string& line) {
  if (!log_file_ || replaying_) return;
  std::lock_guard lock(log_mutex_);
  std::ofstream out(*log_file_, std::ios::app | std::ios::binary);
  out << line << '\n';
  out.flush();
  if (!out) throw DataError("cannot append to session log " + log_file_->string());
}

void SessionStore::log_query(const std::string& id, const Session& s) {
  const auto st = s.state();
  if (st != SessionState::kBootstrapping && st != SessionState::kAwaitingLabel) return;
  const auto q = s.next_query();
  append_event(Json{{"event", "queried"}, {"session", id}, {"point_id", q.id},
                    {"phase", to_string(q.phase)}}
                   .dump());
}

void SessionStore::replay(const std::filesystem::path& log_file) {
  std::ifstream in(log_file, std::ios::binary);
  std::string line;
  std::size_t line_no = 0;
  replaying_ = true;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const Json ev = Json::parse(line);
      const auto kind = ev.at("event").get<std::string>();
      const auto id = ev.at("session").get<std::string>();
      if (kind == "created") {
        create_with_id(id, config_from_json(ev.at("config").dump()));
      } else if (kind == "queried") {
        // queries are recomputed; a mismatch means the pipeline is not deterministic
        const auto pending = find(id)->session->next_query().id;
        if (pending != ev.at("point_id").get<PointId>()) {
          throw DataError("replayed query " + std::to_string(pending) + " differs from logged " +
                          ev.at("point_id").dump());
        }
      } else if (kind == "labeled") {
        find(id)->session->submit_label(ev.at("point_id").get<PointId>(),
                                        label_from_int(ev.at("label").get<long>()));
      } else if (kind == "finalized") {
        find(id)->session->finalize();
      } else if (kind == "aborted") {
        find(id)->session->abort();
      }
    }
  } catch (const std::exception& e) {
    replaying_ = false;
    throw DataError("session log " + log_file.string() + " line " + std::to_string(line_no) +
                    ": " + e.what());
  }
  replaying_ = false;
}

}  // namespace palms
