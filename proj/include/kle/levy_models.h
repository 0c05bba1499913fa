#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "kle/special_fn.h"

namespace kle {

using Complex = std::complex<double>;
using Density = std::function<double(double)>;

/// Which compensator the Levy-Khintchine integral uses: h = 0 or h = 1.
enum class Cutoff { h0, h1 };

/// One-dimensional generating triple (a, sigma^2, nu) with nu given by a
/// density on (0, inf). An empty density means nu = 0.
struct GeneratingTriple {
  double a = 0.0;
  double sigma2 = 0.0;
  Density levy_density;
  Cutoff cutoff = Cutoff::h0;

  bool has_jumps() const { return static_cast<bool>(levy_density); }
};

/// g(x) = \int_x^\infty pi(s) ds together with its inverse.
///
/// The inverse follows the indicator convention used by the series samplers:
/// it vanishes for arguments at or above g(0).
class TailIntegral {
 public:
  TailIntegral() = default;
  TailIntegral(std::function<double(double)> g, std::function<double(double)> g_inv, double g0,
               std::function<double(double)> first_moment_above, double activity_scale = 0.0)
      : g_(std::move(g)),
        g_inv_(std::move(g_inv)),
        g0_(g0),
        first_moment_above_(std::move(first_moment_above)),
        activity_scale_(activity_scale) {}

  explicit operator bool() const { return static_cast<bool>(g_); }

  double operator()(double x) const { return g_(x); }
  double inverse(double y) const { return (y > 0.0 && y < g0_) ? g_inv_(y) : 0.0; }

  /// g(0); +inf for infinite-activity models.
  double g0() const { return g0_; }
  bool finite_activity() const { return std::isfinite(g0_); }

  /// \int_x^\infty s pi(s) ds; only when the model supplies a closed form.
  bool has_first_moment_above() const { return static_cast<bool>(first_moment_above_); }
  double first_moment_above(double x) const { return first_moment_above_(x); }

  /// The c in pi(x) = c e^{-rho x}/x; zero when the model is not gamma-type.
  double activity_scale() const { return activity_scale_; }

  /// Same tail with every inverse value multiplied by `factor`.
  TailIntegral scaled_jumps(double factor) const;

 private:
  std::function<double(double)> g_;
  std::function<double(double)> g_inv_;
  double g0_ = 0.0;
  std::function<double(double)> first_moment_above_;
  double activity_scale_ = 0.0;
};

/// A one-dimensional Levy process with only positive jumps (or none).
///
/// Psi(z) = sigma^2 z^2/2 - i a z - \int (e^{izx} - 1 - izx h(x)) nu(dx), so that
/// E[exp(i z X_t)] = exp(-t Psi(z)).
class LevyModel {
 public:
  LevyModel(std::string name, GeneratingTriple triple, double jump_alpha, std::optional<double> jump_mean,
            std::function<Complex(double)> jump_exponent, TailIntegral tail);

  const std::string& name() const { return name_; }
  const GeneratingTriple& triple() const { return triple_; }

  /// Psi''(0) = Var(X_1).
  double alpha() const { return triple_.sigma2 + jump_alpha_; }

  /// \int x nu(dx), when finite.
  std::optional<double> jump_mean() const { return jump_mean_; }

  /// E[X_1] = i Psi'(0).
  double mean_rate() const;

  Complex psi(double z) const;

  /// Jump part of the exponent only, in the triple's cutoff convention.
  Complex jump_exponent(double z) const { return jump_exponent_ ? jump_exponent_(z) : Complex(0.0); }

  bool has_jumps() const { return triple_.has_jumps(); }
  const TailIntegral& tail() const { return tail_; }
  double density(double x) const { return has_jumps() && x > 0.0 ? triple_.levy_density(x) : 0.0; }

  /// Copy with a different drift coordinate.
  LevyModel with_drift(double a) const;
  /// Copy with the jump inverse tail multiplied by `factor` (test hook).
  LevyModel with_scaled_jumps(double factor) const;
  /// Copy without Gaussian part or drift.
  LevyModel jump_part() const;

 private:
  std::string name_;
  GeneratingTriple triple_;
  double jump_alpha_;
  std::optional<double> jump_mean_;
  std::function<Complex(double)> jump_exponent_;
  TailIntegral tail_;
};

/// X = X+ - X- + sqrt(sigma2) W + drift t with independent positive-jump parts.
struct SplitModel {
  std::string name;
  std::optional<LevyModel> pos;
  /// Positive-jump process built from pi(-x).
  std::optional<LevyModel> neg;
  double gaussian_sigma2 = 0.0;
  /// Deterministic drift per unit time outside the jump parts.
  double drift = 0.0;

  /// E[X_1]; the amount re-added per unit time after simulating centered parts.
  double mean_rate() const;
  double alpha() const;
  /// Exponent of the uncentered composite.
  Complex psi(double z) const;
  /// Exponent of X_t - mean_rate t.
  Complex psi_centered(double z) const;
  bool has_jumps() const { return pos.has_value() || neg.has_value(); }
  /// Levy density of the composite on R \ {0}.
  double density(double x) const;
};

// -- factories ----------------------------------------------------------------

LevyModel make_brownian(double sigma2);

/// pi(x) = c e^{-rho x} / x. The inverse tail uses the shared E1 table.
LevyModel make_gamma(double c, double rho);
LevyModel make_gamma(double c, double rho, std::shared_ptr<const MonotoneInverseTable> e1_inverse);

/// Compound Poisson with intensity `rate` and Exp(rho) jumps.
LevyModel make_cp_exponential(double rate, double rho);

/// Generic positive-jump model from a density alone; g by quadrature, g^{-1}
/// by bracketed inversion, Psi by oscillatory quadrature. Slow; meant for
/// models without closed forms and for cross-checks.
LevyModel make_from_density(std::string name, Density pi, double sigma2 = 0.0);

SplitModel make_variance_gamma(double c_pos, double rho_pos, double c_neg, double rho_neg, double sigma2 = 0.0);

/// Wraps a one-sided model, moving its Gaussian part and drift out of the jump part.
SplitModel make_split(const LevyModel& model);

/// Subtracts the mean: a -> a - E[X_1]. Throws std::domain_error if the first moment is infinite.
LevyModel center(const LevyModel& model);

/// Psi''(0) by Richardson-extrapolated central differences.
double psi_second_derivative(const std::function<Complex(double)>& psi, double h = 0.1);
double psi_second_derivative(const LevyModel& model);

// -- integrability checks ------------------------------------------------------

/// \int_{x>1} x^2 nu(dx) < inf, judged from decade contributions on [1, 1e6].
bool satisfies_condition_a(const Density& pi);
/// \int_{x<=1} x nu(dx) < inf, judged from decade contributions on [1e-10, 1].
bool satisfies_condition_b(const Density& pi);
/// nu((0, inf)) < inf, judged the same way as Condition B.
bool has_finite_activity(const Density& pi);

}  // namespace kle
