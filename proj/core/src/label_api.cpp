#include "palms/label_api.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "json.hpp"
#include "palms/error.hpp"

namespace palms {

namespace {

using Json = nlohmann::ordered_json;

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json model_json(const ModelParams& m) { return Json{{"C", m.C}, {"gamma", m.gamma}}; }

Json progress_json(const Progress& p) {
  Json j{{"state", to_string(p.state)},
         {"labels_used", p.labels_used},
         {"budget", p.budget},
         {"remaining", p.budget - p.labels_used}};
  j["phase"] = p.phase ? Json(to_string(*p.phase)) : Json(nullptr);
  return j;
}

Json status_json(const std::string& id, const Session& s) {
  Json j{{"session_id", id}};
  j.update(progress_json(s.progress()));
  j["labels_per_class"] = Json{{"0", s.labels_in_class(ClassLabel::kZero)},
                               {"1", s.labels_in_class(ClassLabel::kOne)}};
  j["bootstrap_labels"] = s.bootstrap_label_count();
  return j;
}

Json error_json(std::string_view code, std::string_view message) {
  return Json{{"code", code}, {"message", message}};
}

int http_status(ErrorKind k) {
  switch (k) {
    case ErrorKind::kUsage:
    case ErrorKind::kData:
      return 400;
    case ErrorKind::kNotFound:
      return 404;
    case ErrorKind::kState:
    case ErrorKind::kConflict:
      return 409;
    case ErrorKind::kNumerical:
      return 500;
  }
  return 500;
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  const auto q = path.find('?');
  if (q != std::string_view::npos) path = path.substr(0, q);
  std::size_t pos = 0;
  while (pos < path.size()) {
    const auto next = path.find('/', pos);
    const auto end = next == std::string_view::npos ? path.size() : next;
    if (end > pos) parts.push_back(path.substr(pos, end - pos));
    pos = end + 1;
  }
  return parts;
}

ApiResponse respond(int status, const Json& j) { return {status, j.dump()}; }

ApiResponse method_not_allowed(std::string_view method) {
  return respond(405, error_json("method_not_allowed",
                                 std::string(method) + " is not allowed on this resource"));
}

ApiResponse dispatch(SessionStore& store, std::string_view method,
                     const std::vector<std::string_view>& parts, std::string_view body) {
  if (parts.empty() || parts[0] != "sessions" || parts.size() > 3) {
    return respond(404, error_json("not_found", "no such route"));
  }
  if (parts.size() == 1) {
    if (method != "POST") return method_not_allowed(method);
    const auto id = store.create(config_from_json(body.empty() ? "{}" : body));
    return respond(201, Json{{"session_id", id}, {"status", status_json(id, store.snapshot(id))}});
  }
  const std::string id(parts[1]);
  if (parts.size() == 2) {
    if (method != "GET") return method_not_allowed(method);
    return respond(200, status_json(id, store.snapshot(id)));
  }
  const auto action = parts[2];
  if (action == "query") {
    if (method != "GET") return method_not_allowed(method);
    const auto q = store.next_query(id);
    return respond(200, Json{{"point_id", q.id},
                             {"features", q.features},
                             {"phase", to_string(q.phase)},
                             {"progress", progress_json(q.progress)}});
  }
  if (action == "label") {
    if (method != "POST") return method_not_allowed(method);
    Json req;
    try {
      req = Json::parse(body);
    } catch (const Json::exception& e) {
      throw UsageError(std::string("invalid JSON body: ") + e.what());
    }
    if (!req.is_object() || !req.contains("point_id") || !req.contains("label")) {
      throw UsageError("body must be {\"point_id\": <int>, \"label\": 0|1}");
    }
    if (!req["point_id"].is_number_unsigned() || !req["label"].is_number_integer()) {
      throw UsageError("point_id must be a non-negative integer and label an integer");
    }
    const auto p = store.submit_label(id, req["point_id"].get<PointId>(),
                                      label_from_int(req["label"].get<long>()));
    return respond(200, progress_json(p));
  }
  if (action == "finalize") {
    if (method != "POST") return method_not_allowed(method);
    return {200, outcome_to_json(store.finalize(id))};
  }
  if (action == "outcome") {
    if (method != "GET") return method_not_allowed(method);
    return {200, outcome_to_json(store.outcome(id))};
  }
  if (action == "abort") {
    if (method != "POST") return method_not_allowed(method);
    store.abort(id);
    return respond(200, status_json(id, store.snapshot(id)));
  }
  return respond(404, error_json("not_found", "no such route"));
}

}  // namespace

ApiResponse handle_request(SessionStore& store, std::string_view method, std::string_view path,
                           std::string_view body) {
  try {
    return dispatch(store, method, split_path(path), body);
  } catch (const Error& e) {
    return respond(http_status(e.kind()), error_json(to_string(e.kind()), e.what()));
  } catch (const Json::exception& e) {
    return respond(400, error_json("usage_error", e.what()));
  } catch (const std::exception& e) {
    return respond(500, error_json("internal", e.what()));
  }
}

std::string outcome_to_json(const SelectionOutcome& o) {
  Json j;
  j["method"] = to_string(o.report.method);
  j["chosen"] = model_json(o.report.chosen);
  Json scores = Json::array();
  for (const auto& s : o.report.scores) {
    Json e = model_json(s.model);
    e["accuracy"] = s.accuracy;
    e["weighted"] = s.weighted;
    scores.push_back(std::move(e));
  }
  j["scores"] = std::move(scores);
  Json tied = Json::array();
  for (const auto& m : o.report.tie_trace.tied) tied.push_back(model_json(m));
  j["tie_trace"] = Json{{"tied", std::move(tied)},
                        {"resolved_by", to_string(o.report.tie_trace.resolved_by)}};
  if (const auto& wa = o.report.weight_assignment) {
    j["weights"] = Json{{"cutoff0", finite_or_null(wa->cutoff0)},
                        {"cutoff1", finite_or_null(wa->cutoff1)},
                        {"w", wa->w},
                        {"weighted_count", wa->weighted_count()},
                        {"values", wa->weights}};
  } else {
    j["weights"] = nullptr;
  }
  j["training_ids"] = o.training_ids;
  Json preds = Json::array();
  for (const auto& p : o.predictions) {
    preds.push_back(
        Json{{"id", p.id}, {"label", to_int(p.label)}, {"decision_value", p.decision_value}});
  }
  j["predictions"] = std::move(preds);
  return j.dump();
}

std::string config_to_json(const SessionConfig& c) {
  Json j;
  j["pool_csv"] = c.pool_csv ? Json(*c.pool_csv) : Json(nullptr);
  j["dataset"] = c.dataset ? Json(*c.dataset) : Json(nullptr);
  j["budget"] = c.budget;
  j["fixed_model"] = c.fixed_model ? model_json(*c.fixed_model) : Json(nullptr);
  j["c_values"] = c.c_values;
  j["gamma_factors"] = c.gamma_factors;
  j["method"] = to_string(c.method);
  j["weight"] = c.weight;
  j["seed"] = c.seed;
  j["bootstrap_per_class"] = c.bootstrap_per_class;
  j["solver"] = Json{{"kkt_tolerance", c.solver.kkt_tolerance},
                     {"max_updates", c.solver.max_updates},
                     {"numerical_epsilon", c.solver.numerical_epsilon}};
  return j.dump();
}

SessionConfig config_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw UsageError(std::string("invalid JSON body: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("session config must be a JSON object");
  SessionConfig c;
  try {
    if (auto v = get_or<std::string>(j, "pool_csv", ""); !v.empty()) c.pool_csv = v;
    if (auto v = get_or<std::string>(j, "dataset", ""); !v.empty()) c.dataset = v;
    const auto budget = get_or<long long>(j, "budget", static_cast<long long>(c.budget));
    if (budget < 1) throw UsageError("budget must be at least 1");
    c.budget = static_cast<std::size_t>(budget);
    if (const auto it = j.find("fixed_model"); it != j.end() && !it->is_null()) {
      c.fixed_model = ModelParams{it->at("C").get<double>(), it->at("gamma").get<double>()};
    }
    c.c_values = get_or(j, "c_values", c.c_values);
    c.gamma_factors = get_or(j, "gamma_factors", c.gamma_factors);
    const auto method = get_or<std::string>(j, "method", to_string(c.method));
    if (method == "PALMS" || method == "palms") {
      c.method = SelectionMethod::kPalms;
    } else if (method == "PALMS_FWC" || method == "palms_fwc" || method == "PALMS-FWC" ||
               method == "palms-fwc") {
      c.method = SelectionMethod::kPalmsFwc;
    } else {
      throw UsageError("method must be PALMS or PALMS_FWC");
    }
    c.weight = get_or(j, "weight", c.weight);
    if (const auto it = j.find("seed"); it != j.end() && !it->is_null()) {
      c.seed = it->get<std::uint64_t>();
    } else {
      std::random_device rd;
      c.seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
    }
    const auto boot = get_or<long long>(j, "bootstrap_per_class", 2);
    if (boot < 1) throw UsageError("bootstrap_per_class must be >= 1");
    c.bootstrap_per_class = static_cast<std::size_t>(boot);
    if (const auto it = j.find("solver"); it != j.end() && !it->is_null()) {
      c.solver.kkt_tolerance = get_or(*it, "kkt_tolerance", c.solver.kkt_tolerance);
      c.solver.max_updates = get_or(*it, "max_updates", c.solver.max_updates);
      c.solver.numerical_epsilon = get_or(*it, "numerical_epsilon", c.solver.numerical_epsilon);
    }
  } catch (const Json::exception& e) {
    throw UsageError(std::string("invalid session config: ") + e.what());
  }
  if (!c.pool_csv && !c.dataset) throw UsageError("session needs pool_csv or dataset");
  return c;
}

}  // namespace palms
