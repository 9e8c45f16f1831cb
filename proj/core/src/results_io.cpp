#include "palms/results_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "palms/error.hpp"

namespace palms {
namespace {

using Json = nlohmann::ordered_json;

Json params_json(const ModelParams& m) { return Json{{"C", m.C}, {"gamma", m.gamma}}; }

ModelParams params_from(const Json& j) { return {j.at("C").get<double>(), j.at("gamma").get<double>()}; }

Json config_json(const ExperimentConfig& c) {
  Json methods = Json::array();
  for (MethodId m : c.methods) methods.push_back(to_string(m));
  return Json{{"dataset", c.dataset_path},
              {"methods", methods},
              {"budget", c.budget},
              {"trials", c.trials},
              {"test_per_class", c.test_per_class},
              {"init_per_class", c.init_per_class},
              {"c_values", c.c_values},
              {"gamma_factors", c.gamma_factors},
              {"default_c", c.default_c},
              {"default_gamma_factor", c.default_gamma_factor},
              {"weight", c.weight},
              {"base_seed", c.base_seed},
              {"stride", c.stride},
              {"oracle_final_budget", c.oracle_final_budget},
              {"solver",
               {{"kkt_tolerance", c.solver.kkt_tolerance},
                {"max_updates", c.solver.max_updates},
                {"numerical_epsilon", c.solver.numerical_epsilon}}}};
}

ExperimentConfig config_from(const Json& j) {
  ExperimentConfig c;
  c.dataset_path = j.at("dataset").get<std::string>();
  c.methods.clear();
  for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m.get<std::string>()));
  c.budget = j.at("budget").get<std::size_t>();
  c.trials = j.at("trials").get<std::size_t>();
  c.test_per_class = j.at("test_per_class").get<std::size_t>();
  c.init_per_class = j.at("init_per_class").get<std::size_t>();
  c.c_values = j.at("c_values").get<std::vector<double>>();
  c.gamma_factors = j.at("gamma_factors").get<std::vector<double>>();
  c.default_c = j.at("default_c").get<double>();
  c.default_gamma_factor = j.at("default_gamma_factor").get<double>();
  c.weight = j.at("weight").get<double>();
  c.base_seed = j.at("base_seed").get<std::uint64_t>();
  c.stride = j.at("stride").get<std::size_t>();
  c.oracle_final_budget = j.at("oracle_final_budget").get<bool>();
  const auto& s = j.at("solver");
  c.solver.kkt_tolerance = s.at("kkt_tolerance").get<double>();
  c.solver.max_updates = s.at("max_updates").get<std::size_t>();
  c.solver.numerical_epsilon = s.at("numerical_epsilon").get<double>();
  return c;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string results_to_json(const ExperimentResult& r) {
  Json doc;
  doc["schema_version"] = kResultsSchemaVersion;
  doc["config"] = config_json(r.config);
  doc["dataset"] = Json{{"n_features", r.n_features}, {"size", r.dataset_size}};
  doc["budgets"] = r.budgets;
  Json aggs = Json::object();
  for (MethodId m : r.config.methods) {
    const auto& a = r.aggregates.at(m);
    aggs[to_string(m)] = Json{{"mean", a.mean}, {"std", a.stddev}};
  }
  doc["aggregates"] = aggs;
  Json trials = Json::array();
  for (const auto& t : r.trials) {
    Json curves = Json::object();
    Json chosen = Json::object();
    for (MethodId m : r.config.methods) {
      curves[to_string(m)] = t.curves.at(m);
      if (t.chosen.count(m)) chosen[to_string(m)] = params_json(t.chosen.at(m));
    }
    Json oracle = Json::array();
    for (const auto& m : t.oracle_models) oracle.push_back(params_json(m));
    trials.push_back(Json{{"trial", t.trial},
                          {"seed", t.seed},
                          {"labels_used", t.labels_used},
                          {"curves", curves},
                          {"chosen", chosen},
                          {"oracle_models", oracle}});
  }
  doc["trials"] = trials;
  return doc.dump(2) + "\n";
}

ExperimentResult results_from_json(const std::string& text) {
  try {
    const Json doc = Json::parse(text);
    const int version = doc.at("schema_version").get<int>();
    if (version != kResultsSchemaVersion) {
      throw DataError("unsupported results schema_version " + std::to_string(version));
    }
    ExperimentResult r;
    r.config = config_from(doc.at("config"));
    r.n_features = doc.at("dataset").at("n_features").get<std::size_t>();
    r.dataset_size = doc.at("dataset").at("size").get<std::size_t>();
    r.budgets = doc.at("budgets").get<std::vector<std::size_t>>();
    for (const auto& [name, a] : doc.at("aggregates").items()) {
      r.aggregates[parse_method(name)] =
          Aggregate{a.at("mean").get<std::vector<double>>(), a.at("std").get<std::vector<double>>()};
    }
    for (const auto& jt : doc.at("trials")) {
      TrialResult t;
      t.trial = jt.at("trial").get<std::size_t>();
      t.seed = jt.at("seed").get<std::uint64_t>();
      t.budgets = r.budgets;
      t.labels_used = jt.at("labels_used").get<std::vector<std::size_t>>();
      for (const auto& [name, c] : jt.at("curves").items()) {
        t.curves[parse_method(name)] = c.get<std::vector<double>>();
      }
      for (const auto& [name, m] : jt.at("chosen").items()) t.chosen[parse_method(name)] = params_from(m);
      for (const auto& m : jt.at("oracle_models")) t.oracle_models.push_back(params_from(m));
      r.trials.push_back(std::move(t));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed results document: ") + e.what());
  }
}

std::string plot_table(const ExperimentResult& r, MethodId method) {
  const auto& a = r.aggregates.at(method);
  std::string out = "budget,mean,std\n";
  for (std::size_t k = 0; k < r.budgets.size(); ++k) {
    out += std::to_string(r.budgets[k]) + "," + format_double(a.mean[k]) + "," +
           format_double(a.stddev[k]) + "\n";
  }
  return out;
}

std::vector<std::filesystem::path> emit_results(const ExperimentResult& result,
                                                const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  const auto write = [&](const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw DataError("cannot write " + p.string());
    written.push_back(p);
  };
  write(out_dir / "results.json", results_to_json(result));
  for (MethodId m : result.config.methods) {
    write(out_dir / (std::string(to_string(m)) + ".csv"), plot_table(result, m));
  }
  return written;
}

ExperimentResult read_results(const std::filesystem::path& results_json) {
  std::ifstream in(results_json, std::ios::binary);
  if (!in) throw DataError("cannot open " + results_json.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return results_from_json(buf.str());
}

}  // namespace palms
