#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace kle {

inline constexpr double kEulerGamma = 0.57721566490153286060651209;

/// Default inverse-table configuration for the gamma-process example.
struct E1TableDefaults {
  static constexpr double domain_lo = 6.226e-22;
  static constexpr double domain_hi = 45.47;
  static constexpr std::size_t n_points = 200000;
  static constexpr double max_spacing = 0.00231;
};

/// E1(x) = \int_x^\infty e^{-s}/s ds for x > 0. Throws std::domain_error otherwise.
double exp_integral_e1(double x);

/// Thrown when a search bracket does not contain the requested value.
class BracketError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Root of fwd(x) = y for a strictly decreasing fwd on [lo, hi].
/// The result satisfies |fwd(x) - y| <= rtol * y, or x is resolved to
/// machine precision inside the bracket.
double invert_monotone(const std::function<double(double)>& fwd, double y, double lo, double hi,
                       double rtol = 1e-12);

/// Sorted lookup table inverting a strictly decreasing function.
///
/// Breakpoints are stored in (log y, log x) coordinates and interpolated with
/// a local cubic through the four nearest nodes, followed by one Newton step
/// on the forward function when its derivative is available.
class MonotoneInverseTable {
 public:
  MonotoneInverseTable() = default;

  /// Samples fwd at the given strictly increasing abscissae.
  MonotoneInverseTable(std::vector<double> breakpoints, std::function<double(double)> fwd,
                       std::function<double(double)> dfwd = {});

  /// Rebuilds a table from stored (x, fwd(x)) pairs, e.g. after loading from disk.
  static MonotoneInverseTable from_pairs(std::vector<double> breakpoints, std::vector<double> values,
                                         std::function<double(double)> fwd = {},
                                         std::function<double(double)> dfwd = {});

  /// Inverse at y. Above the value domain returns the smallest breakpoint;
  /// below it falls back to exact bracketed inversion when fwd is known.
  double operator()(double y) const;

  /// Interpolated inverse without the Newton polish.
  double interpolate(double y) const;

  const std::vector<double>& breakpoints() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  int interpolation_order() const { return 3; }
  double domain_lo() const { return y_.back(); }
  double domain_hi() const { return y_.front(); }
  double max_breakpoint_gap() const;
  double max_value_gap() const;

 private:
  void index();

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> log_x_;
  std::vector<double> log_y_;
  std::function<double(double)> fwd_;
  std::function<double(double)> dfwd_;
};

/// Inverse of E1 on the value domain [domain_lo, domain_hi].
///
/// Abscissae are log-spaced in x until the gap reaches max_spacing and evenly
/// spaced beyond that, so both abscissa and value gaps stay below max_spacing.
/// Throws std::invalid_argument if n_points cannot honor the spacing bound.
MonotoneInverseTable build_e1_inverse(double domain_lo = E1TableDefaults::domain_lo,
                                      double domain_hi = E1TableDefaults::domain_hi,
                                      std::size_t n_points = E1TableDefaults::n_points,
                                      double max_spacing = E1TableDefaults::max_spacing);

/// Process-wide default E1 inverse table, built once on first use.
const MonotoneInverseTable& default_e1_inverse();

/// Carries the best estimate when adaptive quadrature gives up.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(std::complex<double> estimate, double achieved_rtol, double requested_rtol)
      : std::runtime_error("quadrature did not converge: achieved rtol " + std::to_string(achieved_rtol) +
                           ", requested " + std::to_string(requested_rtol)),
        estimate_(estimate),
        achieved_(achieved_rtol) {}

  std::complex<double> estimate() const { return estimate_; }
  double achieved_rtol() const { return achieved_; }

 private:
  std::complex<double> estimate_;
  double achieved_;
};

namespace detail {

template <class K>
struct QuadPanel {
  double a, b;
  K value;
  double error;
  double l1;
  bool operator<(const QuadPanel& o) const { return error < o.error; }
};

template <class K, class G>
QuadPanel<K> gauss_kronrod_panel(const G& g, double a, double b) {
  using gk = boost::math::quadrature::gauss_kronrod<double, 15>;
  using gl = boost::math::quadrature::gauss<double, 7>;
  const auto& xk = gk::abscissa();
  const auto& wk = gk::weights();
  const auto& wg = gl::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  // Kronrod nodes: 0, then +-x[i]; Gauss nodes are the odd-indexed ones.
  K f0 = g(mid);
  K kron = f0 * wk[0];
  K gauss = f0 * wg[0];
  double l1 = std::abs(f0) * wk[0];
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const K fp = g(mid + half * xk[i]);
    const K fm = g(mid - half * xk[i]);
    kron += (fp + fm) * wk[i];
    l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
    if (i % 2 == 0) gauss += (fp + fm) * wg[i / 2];
  }
  return {a, b, kron * half, std::abs((kron - gauss) * half), l1 * std::abs(half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
///
/// Either bound may be infinite. Works for real and complex integrands.
/// Converged when the summed error estimate is below rtol * max(|I|, \int|f|).
template <class F>
auto quad(F&& f, double a, double b, double rtol = 1e-10, std::size_t max_panels = 4000)
    -> std::invoke_result_t<F&, double> {
  using K = std::invoke_result_t<F&, double>;
  if (std::isnan(a) || std::isnan(b)) throw std::invalid_argument("quad: NaN bound");
  if (a == b) return K(0);
  if (b < a) return -quad(f, b, a, rtol, max_panels);

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::function<K(double)> g;
  double lo = a, hi = b;
  if (a == -inf && b == inf) {
    g = [&f](double t) {
      const double s = 1.0 - t * t;
      return K(f(t / s) * ((1.0 + t * t) / (s * s)));
    };
    lo = -1.0;
    hi = 1.0;
  } else if (b == inf) {
    g = [&f, a](double t) {
      const double s = 1.0 - t;
      return K(f(a + t / s) * (1.0 / (s * s)));
    };
    lo = 0.0;
    hi = 1.0;
  } else if (a == -inf) {
    g = [&f, b](double t) {
      const double s = 1.0 - t;
      return K(f(b - t / s) * (1.0 / (s * s)));
    };
    lo = 0.0;
    hi = 1.0;
  } else {
    g = [&f](double x) { return K(f(x)); };
  }

  std::priority_queue<detail::QuadPanel<K>> panels;
  auto first = detail::gauss_kronrod_panel<K>(g, lo, hi);
  K total = first.value;
  double err = first.error;
  double l1 = first.l1;
  panels.push(first);

  auto converged = [&] {
    const double scale = std::max(std::abs(total), l1);
    return err <= rtol * scale || err <= std::numeric_limits<double>::min();
  };
  while (!converged()) {
    if (panels.size() >= max_panels) {
      const double scale = std::max(std::abs(total), l1);
      throw QuadratureError(std::complex<double>(total), scale > 0 ? err / scale : err, rtol);
    }
    auto worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // panel cannot be split further in double precision
      const double scale = std::max(std::abs(total), l1);
      throw QuadratureError(std::complex<double>(total), scale > 0 ? err / scale : err, rtol);
    }
    auto left = detail::gauss_kronrod_panel<K>(g, worst.a, mid);
    auto right = detail::gauss_kronrod_panel<K>(g, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    panels.push(left);
    panels.push(right);
  }

  // Re-sum to shed accumulated cancellation from the running updates.
  K sum = K(0);
  while (!panels.empty()) {
    sum += panels.top().value;
    panels.pop();
  }
  return sum;
}

}  // namespace kle
