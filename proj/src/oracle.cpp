#include "kle/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "kle/random.h"

namespace kle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// u_k(t) straight from the closed form, without the recurrence used by the sampler.
double u_direct(std::size_t k, double t, double T) {
  const double h = static_cast<double>(k) - 0.5;
  return std::sqrt(2.0 * T) * std::cos(kPi * h * t / T) / (kPi * h);
}

template <class Range>
Complex cf_average(const Range& samples, std::span<const double> z) {
  if (samples.empty()) throw std::invalid_argument("empirical_cf: no samples");
  double re = 0.0;
  double im = 0.0;
  for (const auto& s : samples) {
    const std::vector<double>& v = [&]() -> const std::vector<double>& {
      if constexpr (std::is_same_v<std::decay_t<decltype(s)>, CoefficientSample>) {
        return s.z;
      } else {
        return s;
      }
    }();
    if (v.size() != z.size()) throw std::invalid_argument("empirical_cf: dimension mismatch");
    double dot = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) dot += z[k] * v[k];
    re += std::cos(dot);
    im += std::sin(dot);
  }
  const double n = static_cast<double>(samples.size());
  return {re / n, im / n};
}

}  // namespace

Complex coeff_char_exponent(const std::function<Complex(double)>& psi_centered, const KleBasis& basis,
                            std::span<const double> z, double rtol) {
  if (z.size() != basis.d) throw std::invalid_argument("coeff_char_exponent: dimension mismatch");
  if (std::all_of(z.begin(), z.end(), [](double v) { return v == 0.0; })) return 0.0;
  auto integrand = [&](double t) {
    double arg = 0.0;
    for (std::size_t k = 1; k <= z.size(); ++k) arg += z[k - 1] * u_direct(k, t, basis.T);
    return psi_centered(arg);
  };
  return quad(integrand, 0.0, basis.T, rtol);
}

Complex coeff_char_exponent(const SplitModel& model, const KleBasis& basis, std::span<const double> z, double rtol) {
  return coeff_char_exponent([&model](double w) { return model.psi_centered(w); }, basis, z, rtol);
}

Complex empirical_cf(std::span<const std::vector<double>> samples, std::span<const double> z) {
  return cf_average(samples, z);
}

Complex empirical_cf(std::span<const CoefficientSample> samples, std::span<const double> z) {
  return cf_average(samples, z);
}

double JumpPath::value_at(double t) const {
  double x = 0.0;
  for (std::size_t i = 0; i < times.size() && times[i] < t; ++i) x += sizes[i];
  return x;
}

namespace {

void sort_by_time(JumpPath& p) {
  std::vector<std::size_t> order(p.times.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p.times[a] < p.times[b]; });
  JumpPath sorted{p.T, {}, {}};
  sorted.times.reserve(order.size());
  sorted.sizes.reserve(order.size());
  for (std::size_t i : order) {
    sorted.times.push_back(p.times[i]);
    sorted.sizes.push_back(p.sizes[i]);
  }
  p = std::move(sorted);
}

}  // namespace

JumpPath direct_series_path(const LevyModel& model, double T, std::uint64_t seed, const ShotConfig& cfg,
                            StreamLabel label) {
  JumpPath p{T, {}, {}};
  if (!model.has_jumps()) return p;
  ArrivalStream stream(derive_seed(seed, label));
  for (std::size_t n = 0;; ++n) {
    const auto [gamma, u] = stream.next();
    if (series_exhausted(model.tail(), T, gamma, cfg)) break;
    if (n >= cfg.max_terms) throw TruncationError(n, gamma);
    const double x = model.tail().inverse(gamma / T);
    if (x == 0.0) continue;
    p.times.push_back(T * u);
    p.sizes.push_back(x);
  }
  sort_by_time(p);
  return p;
}

JumpPath jump_path_from_record(const LevyModel& model, double T, const ShotRecord& record) {
  JumpPath p{T, {}, {}};
  for (std::size_t i = 0; i < record.size(); ++i) {
    const double x = model.tail().inverse(record.gammas[i] / T);
    if (x == 0.0) continue;
    p.times.push_back(T * record.uniforms[i]);
    p.sizes.push_back(x);
  }
  sort_by_time(p);
  return p;
}

double direct_series_subordinator(const LevyModel& model, double T, double t, std::uint64_t seed,
                                  const ShotConfig& cfg) {
  if (!(t >= 0.0 && t <= T)) throw std::domain_error("direct_series_subordinator: t outside [0, T]");
  if (model.has_jumps() && model.triple().cutoff != Cutoff::h0) {
    throw std::invalid_argument("direct_series_subordinator: needs a subordinator (h = 0 triple)");
  }
  if (t == 0.0) return 0.0;
  const JumpPath p = direct_series_path(model, T, seed, cfg);
  double x = 0.0;
  for (std::size_t i = 0; i < p.times.size(); ++i) {
    if (p.times[i] < t) x += p.sizes[i];
  }
  return x + model.triple().a * t;
}

double direct_series_centered_endpoint(const SplitModel& model, double T, std::uint64_t seed, const ShotConfig& cfg) {
  double x = model.drift * T;
  if (model.pos) {
    x += direct_series_subordinator(*model.pos, T, T, seed, cfg);
  }
  if (model.neg) {
    const JumpPath p = direct_series_path(*model.neg, T, seed, cfg, StreamLabel::negative_jumps);
    if (model.neg->has_jumps() && model.neg->triple().cutoff != Cutoff::h0) {
      throw std::invalid_argument("direct series needs subordinator parts");
    }
    for (double s : p.sizes) x -= s;
    x -= model.neg->triple().a * T;
  }
  if (model.gaussian_sigma2 > 0.0) {
    x += std::sqrt(model.gaussian_sigma2 * T) * standard_normal_at(derive_seed(seed, StreamLabel::gaussian), 0);
  }
  return x - model.mean_rate() * T;
}

JumpPath compound_poisson_path(double rate, double rho, double T, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::poisson_distribution<long> count(rate * T);
  std::uniform_real_distribution<double> when(0.0, T);
  std::exponential_distribution<double> size(rho);
  JumpPath p{T, {}, {}};
  const long n = count(engine);
  for (long i = 0; i < n; ++i) {
    p.times.push_back(when(engine));
    p.sizes.push_back(size(engine));
  }
  sort_by_time(p);
  return p;
}

std::vector<double> brute_force_coeffs(const JumpPath& path, double mean_rate, const KleBasis& basis,
                                       std::size_t grid_n) {
  if (grid_n < 3) throw std::invalid_argument("brute_force_coeffs: grid_n must be at least 3");
  const double T = basis.T;
  std::vector<double> z(basis.d, 0.0);

  // Step part: X is constant between consecutive jumps, and \int_a^b e_k = u_k(a) - u_k(b).
  for (std::size_t k = 1; k <= basis.d; ++k) {
    double level = 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < path.times.size(); ++i) {
      level += path.sizes[i];
      const double a = path.times[i];
      const double b = (i + 1 < path.times.size()) ? path.times[i + 1] : T;
      acc += level * (u_direct(k, a, T) - u_direct(k, b, T));
    }
    z[k - 1] = acc;
  }

  // Linear part -mean_rate * t by composite Simpson.
  const std::size_t n = (grid_n % 2 == 1) ? grid_n : grid_n + 1;
  const double h = T / static_cast<double>(n - 1);
  for (std::size_t k = 1; k <= basis.d; ++k) {
    const double w = kPi * (static_cast<double>(k) - 0.5) / T;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = (i == n - 1) ? T : h * static_cast<double>(i);
      const double weight = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      acc += weight * t * std::sin(w * t);
    }
    z[k - 1] -= mean_rate * std::sqrt(2.0 / T) * acc * h / 3.0;
  }
  return z;
}

double kolmogorov_survival(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 100 || b.size() < 100) throw std::invalid_argument("ks_two_sample: need at least 100 samples each");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  const double en = std::sqrt(n * m / (n + m));
  return {d, kolmogorov_survival((en + 0.12 + 0.11 / en) * d)};
}

double mixed_fourth_cumulant(const SplitModel& model, const KleBasis& basis, std::size_t j, std::size_t k,
                             double rtol) {
  if (j == 0 || k == 0 || j == k) throw std::invalid_argument("mixed_fourth_cumulant: need distinct j, k >= 1");
  if (!model.has_jumps()) return 0.0;
  const double T = basis.T;
  auto inner = [&](double t) {
    const double uj = u_direct(j, t, T);
    const double uk = u_direct(k, t, T);
    auto integrand = [&](double x) {
      const double fj = x * uj;
      const double fk = x * uk;
      return fj * fj * fk * fk * (model.density(x) + model.density(-x));
    };
    return quad(integrand, 0.0, kInf, rtol);
  };
  return quad(inner, 0.0, T, rtol);
}

}  // namespace kle
