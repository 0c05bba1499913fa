#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kle {

/// Sine eigenbasis of the covariance operator alpha * min(s, t) on [0, T].
struct KleBasis {
  double T = 1.0;
  std::size_t d = 1;
  double alpha = 1.0;

  KleBasis(double horizon, std::size_t dimension, double variance_rate = 1.0);
};

/// alpha T^2 / (pi^2 (k - 1/2)^2), k >= 1.
double eigenvalue(std::size_t k, const KleBasis& basis);

/// sqrt(2/T) sin(pi (k - 1/2) t / T) for t in [0, T].
double eigenfunction(std::size_t k, double t, const KleBasis& basis);

/// u_k(t) = \int_t^T e_k(s) ds = sqrt(2T) cos(pi (k - 1/2) t / T) / (pi (k - 1/2)).
double integrated_eigenfunction(std::size_t k, double t, const KleBasis& basis);

/// f(x, t) in R^d: component k is x * u_k(t).
std::vector<double> f_map(double x, double t, const KleBasis& basis);

/// Drift vector of Z^(d) for a process with h = 0 drift `a`.
std::vector<double> drift_vector(double a, const KleBasis& basis);

/// Variances of the Brownian contribution to each coefficient: sigma^2 T^2 / (pi^2 (k - 1/2)^2).
std::vector<double> gaussian_coefficient_variances(double sigma2, const KleBasis& basis);

/// Share of the total variance alpha T^2 / 2 captured by the first d terms.
double variance_capture(std::size_t d);

/// Fills out[k-1] = cos((k - 1/2) phase) for k = 1..out.size().
///
/// Uses a three-term recurrence re-anchored on exact values every few
/// terms. Results for a given k do not depend on out.size().
void half_integer_cosines(double phase, std::span<double> out);

/// Fills out[k-1] = sin((k - 1/2) phase) for k = 1..out.size(); same scheme.
void half_integer_sines(double phase, std::span<double> out);

enum class SumMode { partial, cesaro };

struct PathApproximation {
  std::vector<double> grid;
  std::vector<double> values;
  SumMode mode = SumMode::partial;
  std::size_t d = 0;
  /// mean_rate * t at each grid point, already included in `values`.
  std::vector<double> mean_correction;
};

/// S^(d)_t = sum_k z_k e_k(t) or its Cesaro mean C^(d)_t, plus mean_rate * t.
///
/// d is z.size(). Cesaro uses weights 1 - (k-1)/d.
PathApproximation reconstruct(std::span<const double> z, const KleBasis& basis, std::span<const double> grid,
                              SumMode mode, double mean_rate);

/// n points evenly spaced on [0, T], both ends included.
std::vector<double> uniform_grid(double T, std::size_t n);

}  // namespace kle
