#include "kle/special_fn.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include <boost/math/tools/toms748_solve.hpp>

namespace kle {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double e1_series(double x) {
  // -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -x / k;
    const double add = term / k;
    sum += add;
    if (std::abs(add) < kEps * std::abs(sum)) break;
  }
  return -kEulerGamma - std::log(x) - sum;
}

double e1_continued_fraction(double x) {
  // modified Lentz on the even form of the continued fraction
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h * std::exp(-x);
}

double e1_derivative(double x) { return -std::exp(-x) / x; }

}  // namespace

double exp_integral_e1(double x) {
  if (!(x > 0.0)) throw std::domain_error("exp_integral_e1: x must be positive");
  if (std::isinf(x)) return 0.0;
  return x <= 1.0 ? e1_series(x) : e1_continued_fraction(x);
}

double invert_monotone(const std::function<double(double)>& fwd, double y, double lo, double hi, double rtol) {
  if (!(lo < hi)) throw std::invalid_argument("invert_monotone: empty bracket");
  const double f_lo = fwd(lo);
  const double f_hi = fwd(hi);
  if (y > f_lo || y < f_hi) {
    throw BracketError("invert_monotone: value " + std::to_string(y) + " outside forward range [" +
                       std::to_string(f_hi) + ", " + std::to_string(f_lo) + "]");
  }
  if (y == f_lo) return lo;
  if (y == f_hi) return hi;

  auto residual = [&](double x) { return fwd(x) - y; };
  std::uintmax_t max_iter = 500;
  auto [a, b] = boost::math::tools::toms748_solve(residual, lo, hi, f_lo - y, f_hi - y,
                                                  boost::math::tools::eps_tolerance<double>(), max_iter);
  const double ra = std::abs(residual(a));
  const double rb = std::abs(residual(b));
  const double x = ra <= rb ? a : b;
  const double r = std::min(ra, rb);
  if (r > rtol * std::abs(y) && (b - a) > 4 * kEps * std::max(std::abs(a), std::abs(b))) {
    throw std::runtime_error("invert_monotone: failed to converge");
  }
  return x;
}

// ---------------------------------------------------------------------------

MonotoneInverseTable::MonotoneInverseTable(std::vector<double> breakpoints, std::function<double(double)> fwd,
                                           std::function<double(double)> dfwd)
    : x_(std::move(breakpoints)), fwd_(std::move(fwd)), dfwd_(std::move(dfwd)) {
  if (!fwd_) throw std::invalid_argument("MonotoneInverseTable: forward function required");
  y_.resize(x_.size());
  std::transform(x_.begin(), x_.end(), y_.begin(), [this](double x) { return fwd_(x); });
  index();
}

MonotoneInverseTable MonotoneInverseTable::from_pairs(std::vector<double> breakpoints, std::vector<double> values,
                                                      std::function<double(double)> fwd,
                                                      std::function<double(double)> dfwd) {
  if (breakpoints.size() != values.size()) throw std::invalid_argument("from_pairs: size mismatch");
  MonotoneInverseTable t;
  t.x_ = std::move(breakpoints);
  t.y_ = std::move(values);
  t.fwd_ = std::move(fwd);
  t.dfwd_ = std::move(dfwd);
  t.index();
  return t;
}

void MonotoneInverseTable::index() {
  if (x_.size() < 4) throw std::invalid_argument("MonotoneInverseTable: need at least 4 breakpoints");
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("MonotoneInverseTable: breakpoints must increase");
    if (!(y_[i] < y_[i - 1])) throw std::invalid_argument("MonotoneInverseTable: values must strictly decrease");
  }
  if (!(x_.front() > 0.0) || !(y_.back() > 0.0)) {
    throw std::invalid_argument("MonotoneInverseTable: breakpoints and values must be positive");
  }
  log_x_.resize(x_.size());
  log_y_.resize(y_.size());
  std::transform(x_.begin(), x_.end(), log_x_.begin(), [](double v) { return std::log(v); });
  std::transform(y_.begin(), y_.end(), log_y_.begin(), [](double v) { return std::log(v); });
}

double MonotoneInverseTable::interpolate(double y) const {
  const double ly = std::log(y);
  // log_y_ is descending; first node not greater than ly
  const auto it = std::lower_bound(log_y_.begin(), log_y_.end(), ly, std::greater<>());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(log_y_.size());
  std::ptrdiff_t j = (it - log_y_.begin()) - 1;
  std::ptrdiff_t s = std::clamp<std::ptrdiff_t>(j - 1, 0, n - 4);

  double result = 0.0;
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (a == b) continue;
      w *= (ly - log_y_[s + b]) / (log_y_[s + a] - log_y_[s + b]);
    }
    result += w * log_x_[s + a];
  }
  return std::exp(result);
}

double MonotoneInverseTable::operator()(double y) const {
  if (!(y > 0.0)) throw std::domain_error("MonotoneInverseTable: argument must be positive");
  if (y >= domain_hi()) return x_.front();
  if (y < domain_lo()) {
    if (!fwd_) return x_.back();
    double hi = 2.0 * x_.back();
    while (fwd_(hi) > y) hi *= 2.0;
    return invert_monotone(fwd_, y, x_.back(), hi);
  }
  double x = interpolate(y);
  if (fwd_ && dfwd_) {
    const double slope = dfwd_(x);
    if (slope != 0.0) {
      const double polished = x - (fwd_(x) - y) / slope;
      if (std::isfinite(polished) && polished > 0.0) x = polished;
    }
  }
  return x;
}

double MonotoneInverseTable::max_breakpoint_gap() const {
  double g = 0.0;
  for (std::size_t i = 1; i < x_.size(); ++i) g = std::max(g, x_[i] - x_[i - 1]);
  return g;
}

double MonotoneInverseTable::max_value_gap() const {
  double g = 0.0;
  for (std::size_t i = 1; i < y_.size(); ++i) g = std::max(g, y_[i - 1] - y_[i]);
  return g;
}

// ---------------------------------------------------------------------------

namespace {

struct SplitGrid {
  double knee;
  std::size_t log_steps;
  std::size_t uniform_steps;
};

// Log-spaced steps up to `knee`, then evenly spaced steps of at most max_gap.
std::optional<SplitGrid> split_grid(double x_lo, double x_hi, std::size_t steps, double max_gap, double knee) {
  // slack keeps rounded breakpoints inside the bound
  const auto uniform = static_cast<std::size_t>(std::ceil((x_hi - knee) / (max_gap * (1.0 - 1e-9))));
  if (uniform + 1 > steps) return std::nullopt;
  const std::size_t logs = steps - uniform;
  const double h = std::log(knee / x_lo) / static_cast<double>(logs);
  if (knee * (1.0 - std::exp(-h)) > max_gap * (1.0 - 1e-9)) return std::nullopt;
  return SplitGrid{knee, logs, uniform};
}

}  // namespace

MonotoneInverseTable build_e1_inverse(double domain_lo, double domain_hi, std::size_t n_points, double max_spacing) {
  if (!(domain_lo > 0.0) || !(domain_lo < domain_hi)) {
    throw std::invalid_argument("build_e1_inverse: need 0 < domain_lo < domain_hi");
  }
  if (n_points < 4) throw std::invalid_argument("build_e1_inverse: need at least 4 points");
  if (!(max_spacing > 0.0)) throw std::invalid_argument("build_e1_inverse: spacing bound must be positive");
  constexpr double x_floor = 1e-300;
  constexpr double x_ceiling = 700.0;
  if (domain_hi >= exp_integral_e1(x_floor) || domain_lo <= exp_integral_e1(x_ceiling)) {
    throw std::invalid_argument("build_e1_inverse: domain not resolvable in double precision");
  }

  auto e1 = [](double x) { return exp_integral_e1(x); };
  const double x_lo = invert_monotone(e1, domain_hi, x_floor, 1.0, 1e-15);
  const double x_hi = invert_monotone(e1, domain_lo, 1e-3, x_ceiling, 1e-15);
  const std::size_t steps = n_points - 1;

  std::vector<double> xs(n_points);
  const double log_span = std::log(x_hi / x_lo);
  const double pure_h = log_span / static_cast<double>(steps);
  if (x_hi * (1.0 - std::exp(-pure_h)) <= max_spacing) {
    for (std::size_t j = 0; j < n_points; ++j) xs[j] = x_lo * std::exp(log_span * j / static_cast<double>(steps));
  } else {
    // Largest feasible knee by bisection; feasibility is monotone up to rounding.
    double good = x_lo * (1.0 + 1e-12);
    double bad = x_hi;
    if (!split_grid(x_lo, x_hi, steps, max_spacing, good)) {
      throw std::invalid_argument("build_e1_inverse: too few points for the spacing bound");
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (good + bad);
      if (split_grid(x_lo, x_hi, steps, max_spacing, mid)) good = mid; else bad = mid;
    }
    const SplitGrid g = *split_grid(x_lo, x_hi, steps, max_spacing, good);
    const double knee_span = std::log(g.knee / x_lo);
    for (std::size_t j = 0; j <= g.log_steps; ++j) {
      xs[j] = x_lo * std::exp(knee_span * j / static_cast<double>(g.log_steps));
    }
    for (std::size_t j = 1; j <= g.uniform_steps; ++j) {
      xs[g.log_steps + j] = g.knee + (x_hi - g.knee) * j / static_cast<double>(g.uniform_steps);
    }
  }
  xs.front() = x_lo;
  xs.back() = x_hi;

  MonotoneInverseTable table(std::move(xs), e1, e1_derivative);
  if (table.max_value_gap() > max_spacing || table.max_breakpoint_gap() > max_spacing) {
    throw std::invalid_argument("build_e1_inverse: spacing bound violated");
  }
  return table;
}

const MonotoneInverseTable& default_e1_inverse() {
  static const MonotoneInverseTable table = build_e1_inverse();
  return table;
}

}  // namespace kle
