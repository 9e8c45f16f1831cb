// palms: experiment runner, limited-set statistics and the labeling service.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "http_routes.hpp"
#include "httplib.h"
#include "palms/csv.hpp"
#include "palms/error.hpp"
#include "palms/experiment.hpp"
#include "palms/label_api.hpp"
#include "palms/limited_set.hpp"
#include "palms/results_io.hpp"
#include "palms/session.hpp"
#include "palms/splits.hpp"
#include "palms/standardizer.hpp"

namespace {

struct RunArgs {
  palms::ExperimentConfig config;
  std::string methods = "RANDOM,DEFAULT,ORACLE,PALMS,PALMS_FWC";
  std::string out = "out";
};

struct LimitedArgs {
  std::string dataset;
  palms::LimitedSetParams params;
  std::size_t test_per_class = 50;
  std::size_t draws = 20;
  std::uint64_t seed = 0;
  std::string reference = "test";
};

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<std::string> datasets;
  std::string log_dir;
};

int cmd_run(RunArgs& a) {
  a.config.methods = palms::parse_method_list(a.methods);
  a.config.validate();
  const auto data = palms::load_csv(a.config.dataset_path);
  std::fprintf(stderr, "%s: %zu points, %zu features, %zu trials\n",
               a.config.dataset_path.c_str(), data.size(), data.n_features(), a.config.trials);
  const auto result = palms::run_experiment(data, a.config);
  const auto files = palms::emit_results(result, a.out);
  std::printf("%-10s %8s %8s   (budget %zu)\n", "method", "mean", "std", a.config.budget);
  for (const auto& [m, agg] : result.aggregates) {
    std::printf("%-10s %8.4f %8.4f\n", palms::to_string(m), agg.mean.back(), agg.stddev.back());
  }
  for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
  return 0;
}

int cmd_limited(const LimitedArgs& a) {
  a.params.validate();
  if (a.draws == 0) throw palms::UsageError("--draws must be at least 1");
  if (a.reference != "test" && a.reference != "full") {
    throw palms::UsageError("--reference must be 'test' or 'full'");
  }
  const auto raw = palms::load_csv(a.dataset);
  const auto data = palms::apply_standardizer(palms::fit_standardizer(raw), raw);
  double total = 0.0;
  for (std::size_t d = 0; d < a.draws; ++d) {
    palms::SeededRng rng(a.seed + d);
    const auto split = palms::stratified_test_split(data, a.test_per_class, rng);
    const auto& reference = a.reference == "test" ? split.selected : data;
    total += palms::limited_fraction(split.selected, reference, a.params);
  }
  std::printf("%s: %.1f%% limited (k=%zu, rho=%g, %s neighbors, mean over %zu draws)\n",
              a.dataset.c_str(), 100.0 * total / static_cast<double>(a.draws), a.params.k,
              a.params.rho, a.reference.c_str(), a.draws);
  return 0;
}

int cmd_serve(const ServeArgs& a) {
  std::map<std::string, palms::Dataset> datasets;
  for (const auto& spec : a.datasets) {
    // name=path, or a bare path registered under its file stem
    const auto eq = spec.find('=');
    const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    const std::string name =
        eq == std::string::npos ? std::filesystem::path(path).stem().string() : spec.substr(0, eq);
    datasets.emplace(name, palms::load_csv(path));
  }
  std::optional<std::filesystem::path> log_dir;
  if (!a.log_dir.empty()) log_dir = a.log_dir;
  palms::SessionStore store(log_dir, std::move(datasets));

  httplib::Server server;
  palms::mount_session_routes(server, store);
  std::fprintf(stderr, "listening on %s:%d (%zu sessions restored)\n", a.host.c_str(), a.port,
               store.size());
  if (!server.listen(a.host, a.port)) {
    throw palms::UsageError("cannot listen on " + a.host + ":" + std::to_string(a.port));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PALMS active learning and model selection toolkit"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "run the benchmark protocol on one dataset");
  run_cmd->add_option("--dataset", run.config.dataset_path, "CSV with f1..fn,label")->required();
  run_cmd->add_option("--methods", run.methods, "comma list of methods")->capture_default_str();
  run_cmd->add_option("--budget", run.config.budget)->capture_default_str();
  run_cmd->add_option("--trials", run.config.trials)->capture_default_str();
  run_cmd->add_option("--test-per-class", run.config.test_per_class)->capture_default_str();
  run_cmd->add_option("--init-per-class", run.config.init_per_class)->capture_default_str();
  run_cmd->add_option("--weight", run.config.weight, "PALMS-fwc weight w")->capture_default_str();
  run_cmd->add_option("--seed", run.config.base_seed, "base seed")->capture_default_str();
  run_cmd->add_option("--stride", run.config.stride, "evaluate every n-th budget")
      ->capture_default_str();
  run_cmd->add_option("--out", run.out, "output directory")->capture_default_str();
  run_cmd->add_flag("--oracle-final-budget", run.config.oracle_final_budget,
                    "ORACLE fixes one model per trial at the final budget");
  run_cmd->add_option("--workers", run.config.workers, "threads, 0 = all cores")
      ->capture_default_str();

  LimitedArgs lim;
  auto* lim_cmd = app.add_subcommand("limited", "mean share of limited test points");
  lim_cmd->add_option("--dataset", lim.dataset)->required();
  lim_cmd->add_option("--k", lim.params.k)->capture_default_str();
  lim_cmd->add_option("--rho", lim.params.rho)->capture_default_str();
  lim_cmd->add_option("--test-per-class", lim.test_per_class)->capture_default_str();
  lim_cmd->add_option("--draws", lim.draws)->capture_default_str();
  lim_cmd->add_option("--seed", lim.seed)->capture_default_str();
  lim_cmd->add_option("--reference", lim.reference, "neighbor pool: test or full")
      ->capture_default_str();

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP labeling service");
  serve_cmd->add_option("--host", serve.host)->capture_default_str();
  serve_cmd->add_option("--port", serve.port)->capture_default_str();
  serve_cmd->add_option("--dataset", serve.datasets, "server-side pool, name=path or path");
  serve_cmd->add_option("--log-dir", serve.log_dir, "session event log directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*lim_cmd) return cmd_limited(lim);
    if (*serve_cmd) return cmd_serve(serve);
  } catch (const palms::Error& e) {
    std::fprintf(stderr, "palms: %s\n", e.what());
    return palms::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "palms: %s\n", e.what());
    return 2;
  }
  return 1;
}
