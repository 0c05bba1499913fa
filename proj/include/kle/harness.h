#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kle/kle_basis.h"
#include "kle/levy_models.h"
#include "kle/shot_noise.h"
#include "kle/special_fn.h"
#include "kle/validation.h"

namespace kle {

/// Malformed configuration; maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  /// {"model": "variance_gamma" | "gamma" | "cp_exponential" | "brownian", ...parameters}
  nlohmann::json model = {{"model", "variance_gamma"}, {"c_pos", 1.0}, {"rho_pos", 1.0},
                          {"c_neg", 1.0}, {"rho_neg", 2.0}, {"sigma2", 0.0}};
  double T = 1.0;
  std::vector<std::size_t> d_list{5};
  std::size_t n_paths = 1;
  std::size_t grid_n = 1001;
  std::uint64_t seed = 42;
  SumMode mode = SumMode::partial;
  std::filesystem::path output = ".";
  unsigned threads = default_thread_count();
  double gamma_cutoff = E1TableDefaults::domain_hi;
  std::size_t max_terms = 10'000'000;
  /// validate: KS comparison dimension and sample count.
  std::size_t ks_d = 300;
  std::size_t ks_samples = 2'000;

  ShotConfig shot() const;
};

/// Reads the config document; missing keys keep their defaults.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Throws ConfigError when an invariant fails.
void validate_config(const ExperimentConfig& cfg);

SplitModel build_model(const nlohmann::json& spec);

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// Writes path{p}_d{d}.csv (t,value) for every path and d, and
/// coeffs_d{d}.csv. Coefficients are nested across d_list.
std::vector<std::filesystem::path> cmd_simulate_paths(const ExperimentConfig& cfg);

struct McMeanCurve {
  std::size_t d = 0;
  std::vector<double> t;
  std::vector<double> mean;
  std::vector<double> expected;
  std::vector<double> stderr_;
};

/// Monte Carlo mean of the reconstructed path for each d, from one set of
/// nested samples. Deterministic for any thread count.
std::vector<McMeanCurve> run_mc_mean(const ExperimentConfig& cfg);

/// Writes mc_mean_d{d}.csv with t,mc_mean,expected,abs_err,stderr.
std::vector<std::filesystem::path> cmd_mc_mean(const ExperimentConfig& cfg);

/// Runs the validation suites; writes validation.json and returns the report.
nlohmann::json cmd_validate(const ExperimentConfig& cfg);

/// "d,capture" lines.
std::string cmd_variance_capture(const std::vector<std::size_t>& d_list);

enum class TableFormat { csv, binary };

/// Writes the (y, x) breakpoints of the table.
void save_e1_table(const MonotoneInverseTable& table, const std::filesystem::path& path, TableFormat format);
MonotoneInverseTable load_e1_table(const std::filesystem::path& path, TableFormat format);

}  // namespace kle
