#include "kle/kle_basis.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kAnchorEvery = 32;

double half(std::size_t k) { return static_cast<double>(k) - 0.5; }

void check_index(std::size_t k) {
  if (k == 0) throw std::invalid_argument("KLE index k starts at 1");
}

void check_time(double t, const KleBasis& basis) {
  if (!(t >= 0.0 && t <= basis.T)) throw std::domain_error("time outside [0, T]");
}

// Rotation by the phase, re-anchored every kAnchorEvery terms. The three-term
// cosine recurrence amplifies anchor rounding near phase = 0 or pi; rotation does not.
template <bool Cosine>
void half_integer_series(double phase, std::span<double> out) {
  const double cp = std::cos(phase);
  const double sp = std::sin(phase);
  double c = 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i % kAnchorEvery == 0) {
      const double arg = (static_cast<double>(i) + 0.5) * phase;
      c = std::cos(arg);
      s = std::sin(arg);
    } else {
      const double next_c = c * cp - s * sp;
      s = s * cp + c * sp;
      c = next_c;
    }
    out[i] = Cosine ? c : s;
  }
}

}  // namespace

KleBasis::KleBasis(double horizon, std::size_t dimension, double variance_rate)
    : T(horizon), d(dimension), alpha(variance_rate) {
  if (!(T > 0.0)) throw std::invalid_argument("KleBasis: T must be positive");
  if (d == 0) throw std::invalid_argument("KleBasis: d must be positive");
  if (!(alpha >= 0.0)) throw std::invalid_argument("KleBasis: alpha must be nonnegative");
}

double eigenvalue(std::size_t k, const KleBasis& basis) {
  check_index(k);
  const double h = half(k);
  return basis.alpha * basis.T * basis.T / (kPi * kPi * h * h);
}

double eigenfunction(std::size_t k, double t, const KleBasis& basis) {
  check_index(k);
  check_time(t, basis);
  return std::sqrt(2.0 / basis.T) * std::sin(kPi * half(k) * t / basis.T);
}

double integrated_eigenfunction(std::size_t k, double t, const KleBasis& basis) {
  check_index(k);
  check_time(t, basis);
  const double h = half(k);
  return std::sqrt(2.0 * basis.T) * std::cos(kPi * h * t / basis.T) / (kPi * h);
}

std::vector<double> f_map(double x, double t, const KleBasis& basis) {
  check_time(t, basis);
  std::vector<double> out(basis.d);
  half_integer_cosines(kPi * t / basis.T, out);
  const double scale = std::sqrt(2.0 * basis.T) * x / kPi;
  for (std::size_t k = 1; k <= basis.d; ++k) out[k - 1] *= scale / half(k);
  return out;
}

std::vector<double> drift_vector(double a, const KleBasis& basis) {
  std::vector<double> out(basis.d);
  const double scale = a * std::sqrt(2.0) * std::pow(basis.T, 1.5) / (kPi * kPi);
  for (std::size_t k = 1; k <= basis.d; ++k) {
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    out[k - 1] = sign * scale / (half(k) * half(k));
  }
  return out;
}

std::vector<double> gaussian_coefficient_variances(double sigma2, const KleBasis& basis) {
  if (sigma2 < 0.0) throw std::invalid_argument("sigma2 must be nonnegative");
  std::vector<double> out(basis.d);
  for (std::size_t k = 1; k <= basis.d; ++k) {
    out[k - 1] = sigma2 * basis.T * basis.T / (kPi * kPi * half(k) * half(k));
  }
  return out;
}

double variance_capture(std::size_t d) {
  if (d == 0) throw std::invalid_argument("variance_capture: d must be positive");
  double sum = 0.0;
  for (std::size_t k = d; k >= 1; --k) sum += 1.0 / (half(k) * half(k));  // small terms first
  return 2.0 / (kPi * kPi) * sum;
}

void half_integer_cosines(double phase, std::span<double> out) {
  half_integer_series<true>(phase, out);
}

void half_integer_sines(double phase, std::span<double> out) {
  half_integer_series<false>(phase, out);
}

PathApproximation reconstruct(std::span<const double> z, const KleBasis& basis, std::span<const double> grid,
                              SumMode mode, double mean_rate) {
  if (z.size() != basis.d) throw std::invalid_argument("reconstruct: coefficient count does not match basis");
  PathApproximation path;
  path.grid.assign(grid.begin(), grid.end());
  path.values.resize(grid.size());
  path.mean_correction.resize(grid.size());
  path.mode = mode;
  path.d = z.size();

  const std::size_t d = z.size();
  std::vector<double> weights(d, 1.0);
  if (mode == SumMode::cesaro) {
    for (std::size_t k = 1; k <= d; ++k) weights[k - 1] = 1.0 - static_cast<double>(k - 1) / d;
  }
  const double norm = std::sqrt(2.0 / basis.T);
  std::vector<double> sines(d);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    check_time(t, basis);
    half_integer_sines(kPi * t / basis.T, sines);
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) acc += weights[k] * z[k] * sines[k];
    path.mean_correction[i] = mean_rate * t;
    path.values[i] = norm * acc + path.mean_correction[i];
  }
  return path;
}

std::vector<double> uniform_grid(double T, std::size_t n) {
  if (n < 2) throw std::invalid_argument("uniform_grid: need at least 2 points");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = T * static_cast<double>(i) / static_cast<double>(n - 1);
  g.back() = T;
  return g;
}

}  // namespace kle
