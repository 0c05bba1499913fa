// kle: command-line front end for the KLE Levy path simulator.
//
// Exit status: 0 ok, 1 validation failure, 2 configuration or usage error,
// 3 runtime failure (I/O, numerical breakdown).

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "kle/harness.h"

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailed = 1;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> T;
  std::vector<std::size_t> d_list;
  std::optional<std::size_t> n_paths;
  std::optional<std::size_t> grid_n;
  std::optional<std::string> mode;
  std::optional<std::string> output;
  std::optional<unsigned> threads;
  std::optional<std::string> model;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config, "JSON experiment config");
    app->add_option("--seed", seed);
    app->add_option("--T", T, "horizon");
    app->add_option("--d", d_list, "ascending dimensions")->delimiter(',');
    app->add_option("--n-paths", n_paths);
    app->add_option("--grid-n", grid_n);
    app->add_option("--mode", mode)->check(CLI::IsMember({"partial", "cesaro"}));
    app->add_option("-o,--output", output, "output directory");
    app->add_option("--threads", threads, "worker threads (default: KLE_THREADS or all cores)");
    app->add_option("--model", model, "variance_gamma | gamma | cp_exponential | brownian (default parameters)");
  }

  kle::ExperimentConfig resolve() const {
    nlohmann::json doc = nlohmann::json::object();
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw kle::ConfigError("cannot read config " + config);
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw kle::ConfigError(std::string("config: ") + e.what());
      }
      if (!doc.is_object()) throw kle::ConfigError("config: top level must be an object");
    }
    if (model) doc["model"] = *model;
    if (seed) doc["seed"] = *seed;
    if (T) doc["T"] = *T;
    if (!d_list.empty()) doc["d_list"] = d_list;
    if (n_paths) doc["n_paths"] = *n_paths;
    if (grid_n) doc["grid_n"] = *grid_n;
    if (mode) doc["mode"] = *mode;
    if (output) doc["output"] = *output;
    if (threads) doc["threads"] = *threads;
    return kle::parse_config(doc);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Karhunen-Loeve simulation of Levy processes"};
  app.require_subcommand(1);

  Overrides sim_opts;
  auto* sim = app.add_subcommand("simulate-paths", "write KLE sample paths for each d");
  sim_opts.attach(sim);

  Overrides mc_opts;
  auto* mc = app.add_subcommand("mc-mean", "Monte Carlo mean of the KLE paths against mean_rate * t");
  mc_opts.attach(mc);

  Overrides val_opts;
  auto* val = app.add_subcommand("validate", "run the oracle suites and write validation.json");
  val_opts.attach(val);

  std::vector<std::size_t> capture_d{1, 2, 4, 5, 20, 21};
  auto* cap = app.add_subcommand("variance-capture", "share of variance captured by the first d terms");
  cap->add_option("--d", capture_d, "dimensions")->delimiter(',');

  std::string table_out;
  std::string table_in;
  std::string table_format = "csv";
  auto* tab = app.add_subcommand("e1-table", "dump or check the inverse E1 table");
  tab->add_option("--out", table_out, "write the default table here");
  tab->add_option("--check", table_in, "load a table and verify its roundtrip");
  tab->add_option("--format", table_format)->check(CLI::IsMember({"csv", "binary"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*sim) {
      const auto files = kle::cmd_simulate_paths(sim_opts.resolve());
      std::cout << "wrote " << files.size() << " files\n";
    } else if (*mc) {
      const auto cfg = mc_opts.resolve();
      const auto files = kle::cmd_mc_mean(cfg);
      for (const auto& f : files) std::cout << f.string() << '\n';
    } else if (*val) {
      const auto report = kle::cmd_validate(val_opts.resolve());
      std::cout << report.dump(2) << '\n';
      return report.at("passed").get<bool>() ? kOk : kValidationFailed;
    } else if (*cap) {
      std::cout << kle::cmd_variance_capture(capture_d);
    } else if (*tab) {
      const auto fmt = table_format == "csv" ? kle::TableFormat::csv : kle::TableFormat::binary;
      if (table_out.empty() && table_in.empty()) throw kle::ConfigError("e1-table: give --out or --check");
      if (!table_out.empty()) {
        kle::save_e1_table(kle::default_e1_inverse(), table_out, fmt);
        std::cout << "wrote " << table_out << '\n';
      }
      if (!table_in.empty()) {
        const auto check = kle::check_e1_roundtrip(kle::load_e1_table(table_in, fmt));
        std::cout << check.name << ' ' << check.statistic << " tol " << check.tolerance << ' '
                  << (check.passed ? "pass" : "FAIL") << '\n';
        return check.passed ? kOk : kValidationFailed;
      }
    }
  } catch (const kle::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
