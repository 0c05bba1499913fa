#include "kle/levy_models.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace kle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Complex kI{0.0, 1.0};

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive");
}

// Contributions of \int w(x) dx over consecutive decades [10^k, 10^{k+1}].
std::vector<double> decade_integrals(const std::function<double(double)>& w, int first_exp, int last_exp) {
  std::vector<double> out;
  const double ln10 = std::log(10.0);
  for (int k = first_exp; k < last_exp; ++k) {
    auto in_log = [&](double s) {
      const double x = std::exp(s);
      return w(x) * x;
    };
    out.push_back(quad(in_log, k * ln10, (k + 1) * ln10, 1e-8));
  }
  return out;
}

// A tail is integrable when the contribution of its extreme decade has
// decayed to at most half of the largest decade.
bool decays(const std::vector<double>& decades, bool extreme_is_first) {
  double largest = 0.0;
  for (double v : decades) {
    if (!std::isfinite(v)) return false;
    largest = std::max(largest, std::abs(v));
  }
  if (largest == 0.0) return true;
  const double extreme = std::abs(extreme_is_first ? decades.front() : decades.back());
  return extreme <= 0.5 * largest;
}

}  // namespace

bool satisfies_condition_a(const Density& pi) {
  return decays(decade_integrals([&](double x) { return x * x * pi(x); }, 0, 6), false);
}

bool satisfies_condition_b(const Density& pi) {
  return decays(decade_integrals([&](double x) { return x * pi(x); }, -10, 0), true);
}

bool has_finite_activity(const Density& pi) {
  return decays(decade_integrals([&](double x) { return pi(x); }, -10, 0), true);
}

// -----------------------------------------------------------------------------

TailIntegral TailIntegral::scaled_jumps(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("scaled_jumps: factor must be positive");
  TailIntegral t = *this;
  auto g = g_;
  auto inv = g_inv_;
  t.g_ = [g, factor](double x) { return g(x / factor); };
  t.g_inv_ = [inv, factor](double y) { return factor * inv(y); };
  if (first_moment_above_) {
    auto m = first_moment_above_;
    t.first_moment_above_ = [m, factor](double x) { return factor * m(x / factor); };
  }
  return t;
}

LevyModel::LevyModel(std::string name, GeneratingTriple triple, double jump_alpha, std::optional<double> jump_mean,
                     std::function<Complex(double)> jump_exponent, TailIntegral tail)
    : name_(std::move(name)),
      triple_(std::move(triple)),
      jump_alpha_(jump_alpha),
      jump_mean_(jump_mean),
      jump_exponent_(std::move(jump_exponent)),
      tail_(std::move(tail)) {
  if (triple_.sigma2 < 0.0) throw std::invalid_argument("sigma2 must be nonnegative");
  if (triple_.has_jumps() && triple_.cutoff == Cutoff::h0 && !jump_mean_) {
    throw std::invalid_argument("h0 cutoff requires a finite jump mean");
  }
}

double LevyModel::mean_rate() const {
  if (triple_.cutoff == Cutoff::h1 || !has_jumps()) return triple_.a;
  return triple_.a + *jump_mean_;
}

Complex LevyModel::psi(double z) const {
  return 0.5 * triple_.sigma2 * z * z - kI * triple_.a * z + jump_exponent(z);
}

LevyModel LevyModel::with_drift(double a) const {
  LevyModel m = *this;
  m.triple_.a = a;
  return m;
}

LevyModel LevyModel::with_scaled_jumps(double factor) const {
  LevyModel m = *this;
  m.tail_ = tail_.scaled_jumps(factor);
  m.name_ = name_ + "_scaled";
  m.jump_alpha_ = jump_alpha_ * factor * factor;
  if (jump_mean_) m.jump_mean_ = *jump_mean_ * factor;
  if (triple_.levy_density) {
    auto pi = triple_.levy_density;
    m.triple_.levy_density = [pi, factor](double x) { return pi(x / factor) / factor; };
  }
  if (jump_exponent_) {
    auto psi = jump_exponent_;
    m.jump_exponent_ = [psi, factor](double z) { return psi(factor * z); };
  }
  return m;
}

LevyModel LevyModel::jump_part() const {
  LevyModel m = *this;
  m.triple_.a = 0.0;
  m.triple_.sigma2 = 0.0;
  return m;
}

// -----------------------------------------------------------------------------

double SplitModel::mean_rate() const {
  double m = drift;
  if (pos) m += pos->mean_rate();
  if (neg) m -= neg->mean_rate();
  return m;
}

double SplitModel::alpha() const {
  double a = gaussian_sigma2;
  if (pos) a += pos->alpha();
  if (neg) a += neg->alpha();
  return a;
}

Complex SplitModel::psi(double z) const {
  Complex v = 0.5 * gaussian_sigma2 * z * z - kI * drift * z;
  if (pos) v += pos->psi(z);
  if (neg) v += neg->psi(-z);
  return v;
}

Complex SplitModel::psi_centered(double z) const { return psi(z) + kI * mean_rate() * z; }

double SplitModel::density(double x) const {
  if (x > 0.0) return pos ? pos->density(x) : 0.0;
  if (x < 0.0) return neg ? neg->density(-x) : 0.0;
  return 0.0;
}

// -----------------------------------------------------------------------------

LevyModel make_brownian(double sigma2) {
  require_positive(sigma2, "sigma2");
  GeneratingTriple triple{0.0, sigma2, {}, Cutoff::h0};
  return LevyModel("brownian", triple, 0.0, 0.0, {}, {});
}

LevyModel make_gamma(double c, double rho) {
  // aliasing constructor: the table outlives every model
  static const std::shared_ptr<const MonotoneInverseTable> shared(std::shared_ptr<const MonotoneInverseTable>{},
                                                                  &default_e1_inverse());
  return make_gamma(c, rho, shared);
}

LevyModel make_gamma(double c, double rho, std::shared_ptr<const MonotoneInverseTable> e1_inverse) {
  require_positive(c, "c");
  require_positive(rho, "rho");
  if (!e1_inverse) throw std::invalid_argument("make_gamma: missing E1 inverse table");
  Density pi = [c, rho](double x) { return x > 0.0 ? c * std::exp(-rho * x) / x : 0.0; };
  if (!satisfies_condition_a(pi) || !satisfies_condition_b(pi)) {
    throw std::invalid_argument("make_gamma: density fails integrability checks");
  }
  TailIntegral tail(
      [c, rho](double x) { return x > 0.0 ? c * exp_integral_e1(rho * x) : kInf; },
      [c, rho, e1_inverse](double y) { return (*e1_inverse)(y / c) / rho; }, kInf,
      [c, rho](double x) { return c / rho * std::exp(-rho * std::max(x, 0.0)); }, c);
  auto exponent = [c, rho](double z) { return c * std::log(Complex(1.0, -z / rho)); };
  GeneratingTriple triple{0.0, 0.0, pi, Cutoff::h0};
  return LevyModel("gamma", triple, c / (rho * rho), c / rho, exponent, tail);
}

LevyModel make_cp_exponential(double rate, double rho) {
  require_positive(rate, "rate");
  require_positive(rho, "rho");
  Density pi = [rate, rho](double x) { return x > 0.0 ? rate * rho * std::exp(-rho * x) : 0.0; };
  if (!satisfies_condition_a(pi)) throw std::invalid_argument("make_cp_exponential: density fails Condition A");
  TailIntegral tail(
      [rate, rho](double x) { return rate * std::exp(-rho * std::max(x, 0.0)); },
      [rate, rho](double y) { return -std::log(y / rate) / rho; }, rate,
      [rate, rho](double x) {
        const double xp = std::max(x, 0.0);
        return rate * std::exp(-rho * xp) * (xp + 1.0 / rho);
      });
  auto exponent = [rate, rho](double z) { return -rate * (rho / Complex(rho, -z) - 1.0); };
  GeneratingTriple triple{0.0, 0.0, pi, Cutoff::h0};
  return LevyModel("cp_exponential", triple, 2.0 * rate / (rho * rho), rate / rho, exponent, tail);
}

LevyModel make_from_density(std::string name, Density pi, double sigma2) {
  if (!pi) throw std::invalid_argument("make_from_density: density required");
  if (!satisfies_condition_a(pi)) throw std::invalid_argument("make_from_density: density fails Condition A");
  const bool cond_b = satisfies_condition_b(pi);
  const Cutoff cutoff = cond_b ? Cutoff::h0 : Cutoff::h1;
  constexpr double rtol = 1e-10;

  auto g = [pi](double x) { return quad(pi, std::max(x, 0.0), kInf, rtol); };
  const double g0 = has_finite_activity(pi) ? quad(pi, 0.0, kInf, rtol) : kInf;
  // Jumps below x_min are dropped; jumps beyond x_max are clamped.
  constexpr double x_min = 1e-12;
  constexpr double x_max = 1e4;
  const double g_min = g(x_min);
  const double g_max = g(x_max);
  auto g_inv = [g, g_min, g_max](double y) {
    if (y >= g_min) return 0.0;
    if (y <= g_max) return x_max;
    return invert_monotone(g, y, x_min, x_max, 1e-10);
  };
  auto first_moment = [pi](double x) {
    return quad([&pi](double s) { return s * pi(s); }, std::max(x, 0.0), kInf, rtol);
  };
  TailIntegral tail(g, g_inv, g0, {});

  const double second = quad([&pi](double s) { return s * s * pi(s); }, 0.0, kInf, rtol);
  std::optional<double> mean;
  if (cond_b) mean = first_moment(0.0);

  std::function<Complex(double)> exponent;
  if (cond_b) {
    exponent = [pi](double z) {
      return -quad([&](double x) { return (std::exp(kI * (z * x)) - 1.0) * pi(x); }, 0.0, kInf, rtol);
    };
  } else {
    exponent = [pi](double z) {
      return -quad([&](double x) { return (std::exp(kI * (z * x)) - 1.0 - kI * (z * x)) * pi(x); }, 0.0, kInf,
                   rtol);
    };
  }
  GeneratingTriple triple{0.0, sigma2, pi, cutoff};
  return LevyModel(std::move(name), triple, second, mean, exponent, tail);
}

SplitModel make_variance_gamma(double c_pos, double rho_pos, double c_neg, double rho_neg, double sigma2) {
  if (sigma2 < 0.0) throw std::invalid_argument("sigma2 must be nonnegative");
  SplitModel m;
  m.name = "variance_gamma";
  m.pos = make_gamma(c_pos, rho_pos);
  m.neg = make_gamma(c_neg, rho_neg);
  m.gaussian_sigma2 = sigma2;
  return m;
}

SplitModel make_split(const LevyModel& model) {
  SplitModel m;
  m.name = model.name();
  if (model.has_jumps()) m.pos = model.jump_part();
  m.gaussian_sigma2 = model.triple().sigma2;
  m.drift = model.triple().a;
  return m;
}

LevyModel center(const LevyModel& model) {
  if (model.has_jumps() && model.triple().cutoff == Cutoff::h0 && !model.jump_mean()) {
    throw std::domain_error("center: infinite first moment");
  }
  return model.with_drift(model.triple().a - model.mean_rate());
}

double psi_second_derivative(const std::function<Complex(double)>& psi, double h) {
  constexpr int levels = 6;
  std::array<double, levels> table{};
  const double p0 = psi(0.0).real();
  for (int j = 0; j < levels; ++j) {
    const double hj = h / std::ldexp(1.0, j);
    table[j] = (psi(hj).real() - 2.0 * p0 + psi(-hj).real()) / (hj * hj);
  }
  // Neville tableau in h^2
  for (int m = 1; m < levels; ++m) {
    const double f = std::ldexp(1.0, 2 * m);
    for (int j = levels - 1; j >= m; --j) table[j] = (f * table[j] - table[j - 1]) / (f - 1.0);
  }
  const double alpha = table[levels - 1];
  if (!std::isfinite(alpha)) throw std::domain_error("psi_second_derivative: non-finite result (Condition A?)");
  return alpha;
}

double psi_second_derivative(const LevyModel& model) {
  return psi_second_derivative([&model](double z) { return model.psi(z); });
}

}  // namespace kle
