#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "kle/kle_basis.h"
#include "kle/levy_models.h"
#include "kle/oracle.h"
#include "kle/parallel.h"
#include "kle/shot_noise.h"

namespace kle {

struct CheckResult {
  std::string name;
  double statistic = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct McOptions {
  std::uint64_t seed = 42;
  std::size_t n_samples = 10'000;
  unsigned threads = default_thread_count();
  std::size_t chunk = 256;
  ShotConfig shot;
};

/// N coefficient vectors; sample i uses seed sample_seed(opts.seed, i).
std::vector<std::vector<double>> draw_coefficients(const SplitModel& model, const KleBasis& basis,
                                                   const McOptions& opts);

/// Zero mean, Var(Z_k) = lambda_k, and pairwise |corr| <= n_se / sqrt(N).
std::vector<CheckResult> check_moments(const SplitModel& model, const KleBasis& basis,
                                       const std::vector<std::vector<double>>& samples, double n_se = 4.0);

/// max over z in scale * {-1, 0, 1}^d of |empirical CF - exp(-Psi_xi(z))|, against n_se / sqrt(N).
CheckResult check_char_function(const SplitModel& model, const KleBasis& basis,
                                const std::vector<std::vector<double>>& samples, double scale = 0.5,
                                double n_se = 4.0);

/// Cov(Z_1^2, Z_2^2) against the mixed fourth cumulant within n_se SE; for
/// models with jumps it must also be positive at positive_se SE.
std::vector<CheckResult> check_dependence(const SplitModel& model, const KleBasis& basis,
                                          const std::vector<std::vector<double>>& samples, double n_se = 5.0,
                                          double positive_se = 4.0);

/// Partial sums S^(d)_T (mean removed) against the centered direct series
/// at t = T, two-sample KS at level `alpha`.
CheckResult check_marginal_ks(const SplitModel& model, double T, std::size_t d, const McOptions& opts,
                              double alpha = 0.01);

/// First and second moments of Z^(d) from brute-force path integration
/// against the shot-noise sampler, within n_se combined SE.
std::vector<CheckResult> check_brute_force(const LevyModel& model, const KleBasis& basis, const McOptions& opts,
                                           std::size_t grid_n = 2001, double n_se = 5.0);

/// max |E1^{-1}(E1(x)) - x| / max(1, x) over a log grid of the table domain.
CheckResult check_e1_roundtrip(const MonotoneInverseTable& table, std::size_t n_points = 2001, double tol = 1e-8);

struct ValidationPlan {
  double T = 1.0;
  std::size_t d = 5;
  McOptions mc;
  std::size_t ks_d = 300;
  std::size_t ks_samples = 2'000;
};

/// Moment, characteristic-function, KS, cumulant and E1 roundtrip suites.
std::vector<CheckResult> run_validation_suites(const SplitModel& model, const ValidationPlan& plan);

nlohmann::json report_json(const std::vector<CheckResult>& results);

}  // namespace kle
