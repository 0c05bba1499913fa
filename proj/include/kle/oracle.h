#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "kle/kle_basis.h"
#include "kle/levy_models.h"
#include "kle/shot_noise.h"

namespace kle {

/// Psi_xi(z) = \int_0^T Psi(<z, u(t)>) dt for the centered composite.
Complex coeff_char_exponent(const SplitModel& model, const KleBasis& basis, std::span<const double> z,
                            double rtol = 1e-10);
Complex coeff_char_exponent(const std::function<Complex(double)>& psi_centered, const KleBasis& basis,
                            std::span<const double> z, double rtol = 1e-10);

/// (1/N) sum_n exp(i <z, Z_n>).
Complex empirical_cf(std::span<const std::vector<double>> samples, std::span<const double> z);
Complex empirical_cf(std::span<const CoefficientSample> samples, std::span<const double> z);

/// Jump times in [0, T) with their sizes, sorted by time.
struct JumpPath {
  double T = 1.0;
  std::vector<double> times;
  std::vector<double> sizes;

  /// Sum of the jumps at times strictly before t.
  double value_at(double t) const;
};

/// Jumps g^{-1}(Gamma_i / T) at T U_i from the positive-jump stream under
/// `seed`, truncated by the same rule as the shot-noise sampler.
JumpPath direct_series_path(const LevyModel& model, double T, std::uint64_t seed, const ShotConfig& cfg,
                            StreamLabel label = StreamLabel::positive_jumps);

/// The jumps encoded by a retained shot record.
JumpPath jump_path_from_record(const LevyModel& model, double T, const ShotRecord& record);

/// Uncentered X_t of a subordinator by the direct series.
double direct_series_subordinator(const LevyModel& model, double T, double t, std::uint64_t seed,
                                  const ShotConfig& cfg);

/// X_T - E[X_T] for a composite by direct series on each jump part plus an
/// exact Gaussian draw; independent of the KLE code path.
double direct_series_centered_endpoint(const SplitModel& model, double T, std::uint64_t seed, const ShotConfig& cfg);

/// Compound Poisson path with Exp(rho) jumps drawn with standard library
/// distributions (no series machinery).
JumpPath compound_poisson_path(double rate, double rho, double T, std::uint64_t seed);

/// Z_k = \int_0^T (X_t - mean_rate t) e_k(t) dt for a piecewise-constant jump
/// path. The step part is integrated exactly between jumps; the linear part
/// by composite Simpson on grid_n points.
std::vector<double> brute_force_coeffs(const JumpPath& path, double mean_rate, const KleBasis& basis,
                                       std::size_t grid_n);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Q_KS(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_survival(double lambda);

/// \int_0^T \int f_j(x,t)^2 f_k(x,t)^2 nu(dx) dt by nested quadrature; j, k >= 1 and j != k.
double mixed_fourth_cumulant(const SplitModel& model, const KleBasis& basis, std::size_t j, std::size_t k,
                             double rtol = 1e-10);

}  // namespace kle
