#include "kle/shot_noise.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kle {

namespace {

constexpr double kPi = std::numbers::pi;

double half(std::size_t k) { return static_cast<double>(k) - 0.5; }

// sqrt(2T) / (pi (k - 1/2)): u_k(t) = scale_k cos(pi (k - 1/2) t / T).
std::vector<double> term_scales(const KleBasis& basis) {
  std::vector<double> s(basis.d);
  const double root = std::sqrt(2.0 * basis.T);
  for (std::size_t k = 1; k <= basis.d; ++k) s[k - 1] = root / (kPi * half(k));
  return s;
}

enum class Route { finite_variation, centered };

// Sum of H(Gamma_i, U_i) over coordinates [k_begin, d), accumulated term by
// term in arrival order. Coordinates below k_begin are left untouched.
class SeriesAccumulator {
 public:
  SeriesAccumulator(const LevyModel& model, const KleBasis& basis, std::size_t k_begin)
      : model_(model), basis_(basis), k_begin_(k_begin), scales_(term_scales(basis)), cosines_(basis.d) {}

  void add(double gamma, double u, std::vector<double>& acc) {
    const double x = model_.tail().inverse(gamma / basis_.T);
    if (x == 0.0) return;
    half_integer_cosines(kPi * u, cosines_);
    for (std::size_t k = k_begin_; k < basis_.d; ++k) acc[k] += (x * scales_[k]) * cosines_[k];
  }

 private:
  const LevyModel& model_;
  const KleBasis& basis_;
  std::size_t k_begin_;
  std::vector<double> scales_;
  std::vector<double> cosines_;
};

struct PartResult {
  std::vector<double> z;
  std::size_t n_terms = 0;
  std::optional<ShotRecord> record;
};

Route route_for(const LevyModel& part) {
  return part.triple().cutoff == Cutoff::h0 ? Route::finite_variation : Route::centered;
}

// Centering count of the h = 1 series: beyond the support the series only
// adds zeros, so the limit uses C(T g(0)).
double centering_count(const LevyModel& model, double T, std::size_t n_terms) {
  if (model.tail().finite_activity()) return T * model.tail().g0();
  return static_cast<double>(n_terms);
}

// Deterministic remainder of one part: drift minus centering, per coordinate.
void finish_part(const LevyModel& model, const KleBasis& basis, Route route, double drift, std::size_t n_terms,
                 const ShotConfig& cfg, std::size_t k_begin, std::vector<double>& acc) {
  const std::vector<double> a = drift_vector(drift, basis);
  std::vector<double> c(basis.d, 0.0);
  if (route == Route::centered) c = centering_vector(model, basis, centering_count(model, basis.T, n_terms), cfg.centering_rtol);
  for (std::size_t k = k_begin; k < basis.d; ++k) acc[k] = (acc[k] - c[k]) + a[k];
}

PartResult sample_part(const LevyModel& model, const KleBasis& basis, const ShotConfig& cfg, StreamLabel label,
                       Route route, double drift) {
  PartResult out;
  out.z.assign(basis.d, 0.0);
  if (cfg.keep_record) out.record.emplace();
  if (model.has_jumps()) {
    ArrivalStream stream(derive_seed(cfg.seed, label));
    SeriesAccumulator acc(model, basis, 0);
    for (;;) {
      const auto [gamma, u] = stream.next();
      if (series_exhausted(model.tail(), basis.T, gamma, cfg)) break;
      if (out.n_terms >= cfg.max_terms) throw TruncationError(out.n_terms, gamma);
      acc.add(gamma, u, out.z);
      ++out.n_terms;
      if (out.record) {
        out.record->gammas.push_back(gamma);
        out.record->uniforms.push_back(u);
      }
    }
  }
  finish_part(model, basis, route, drift, out.n_terms, cfg, 0, out.z);
  return out;
}

void extend_part(const LevyModel& model, const KleBasis& basis, const ShotConfig& cfg, Route route, double drift,
                 const ShotRecord& record, std::size_t k_begin, std::vector<double>& acc) {
  SeriesAccumulator series(model, basis, k_begin);
  for (std::size_t i = 0; i < record.size(); ++i) series.add(record.gammas[i], record.uniforms[i], acc);
  finish_part(model, basis, route, drift, record.size(), cfg, k_begin, acc);
}

void add_gaussian(double sigma2, const KleBasis& basis, const ShotConfig& cfg, std::size_t k_begin,
                  std::vector<double>& z) {
  if (sigma2 == 0.0) return;
  const std::vector<double> var = gaussian_coefficient_variances(sigma2, basis);
  const std::uint64_t seed = derive_seed(cfg.seed, StreamLabel::gaussian);
  for (std::size_t k = k_begin; k < basis.d; ++k) z[k] += std::sqrt(var[k]) * standard_normal_at(seed, k + 1);
}

void check_basis(const KleBasis& basis) {
  if (basis.d == 0) throw std::invalid_argument("basis dimension must be positive");
}

// Drift of a part after centering, and the route it is sampled by.
std::pair<Route, double> plan_part(const LevyModel& part) {
  const LevyModel centered = center(part.jump_part());
  return {route_for(part), centered.triple().a};
}

}  // namespace

bool series_exhausted(const TailIntegral& tail, double T, double gamma, const ShotConfig& cfg) {
  if (tail.finite_activity()) return gamma >= T * tail.g0();
  if (tail.activity_scale() > 0.0) return gamma / (T * tail.activity_scale()) > cfg.gamma_cutoff;
  return tail.inverse(gamma / T) < cfg.jump_floor;
}

ShotRecord ArrivalStream::take(std::size_t n) {
  ShotRecord r;
  r.gammas.reserve(n);
  r.uniforms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [gamma, u] = next();
    r.gammas.push_back(gamma);
    r.uniforms.push_back(u);
  }
  return r;
}

ShotRecord arrival_stream(std::uint64_t seed, std::size_t cap) { return ArrivalStream(seed).take(cap); }

double centering_radial_integral(const LevyModel& model, double T, double s, double rtol) {
  if (!(s >= 0.0)) throw std::invalid_argument("centering_radial_integral: s must be nonnegative");
  const TailIntegral& tail = model.tail();
  // \int_0^Y g^{-1}(y) dy = Y x* + \int_{x*}^\infty g = \int_{x*}^\infty x pi(x) dx, x* = g^{-1}(Y)
  const double y = std::min(s / T, tail.g0());
  if (y == 0.0) return 0.0;
  const double x_star = tail.inverse(y);
  if (tail.has_first_moment_above()) {
    return T * tail.first_moment_above(x_star);
  }
  return T * quad([&model](double x) { return x * model.density(x); }, x_star,
                 std::numeric_limits<double>::infinity(), rtol);
}

std::vector<double> centering_vector(const LevyModel& model, const KleBasis& basis, double s, double rtol) {
  const double radial = centering_radial_integral(model, basis.T, s, rtol);
  std::vector<double> c(basis.d);
  const double root = std::sqrt(2.0 * basis.T);
  for (std::size_t k = 1; k <= basis.d; ++k) {
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    c[k - 1] = sign * root * radial / (kPi * kPi * half(k) * half(k));
  }
  return c;
}

CoefficientSample sample_coeffs_finite_variation(const LevyModel& model, const KleBasis& basis,
                                                 const ShotConfig& cfg) {
  check_basis(basis);
  if (model.has_jumps() && model.triple().cutoff != Cutoff::h0) {
    throw std::invalid_argument("finite-variation series needs an h = 0 triple");
  }
  PartResult part = sample_part(model, basis, cfg, StreamLabel::positive_jumps, Route::finite_variation,
                                model.triple().a);
  add_gaussian(model.triple().sigma2, basis, cfg, 0, part.z);
  CoefficientSample s;
  s.z = std::move(part.z);
  s.d = basis.d;
  s.n_terms_pos = part.n_terms;
  s.seed = cfg.seed;
  s.record_pos = std::move(part.record);
  return s;
}

CoefficientSample sample_coeffs_centered(const LevyModel& model, const KleBasis& basis, const ShotConfig& cfg) {
  check_basis(basis);
  PartResult part = sample_part(model, basis, cfg, StreamLabel::positive_jumps, Route::centered, 0.0);
  CoefficientSample s;
  s.z = std::move(part.z);
  s.d = basis.d;
  s.n_terms_pos = part.n_terms;
  s.seed = cfg.seed;
  s.record_pos = std::move(part.record);
  return s;
}

CoefficientSample sample_coeffs(const SplitModel& model, const KleBasis& basis, const ShotConfig& cfg) {
  check_basis(basis);
  CoefficientSample s;
  s.d = basis.d;
  s.seed = cfg.seed;
  std::vector<double> zp(basis.d, 0.0);
  std::vector<double> zn(basis.d, 0.0);
  if (model.pos) {
    const auto [route, drift] = plan_part(*model.pos);
    PartResult r = sample_part(*model.pos, basis, cfg, StreamLabel::positive_jumps, route, drift);
    zp = std::move(r.z);
    s.n_terms_pos = r.n_terms;
    s.record_pos = std::move(r.record);
  }
  if (model.neg) {
    const auto [route, drift] = plan_part(*model.neg);
    PartResult r = sample_part(*model.neg, basis, cfg, StreamLabel::negative_jumps, route, drift);
    zn = std::move(r.z);
    s.n_terms_neg = r.n_terms;
    s.record_neg = std::move(r.record);
  }
  s.z.resize(basis.d);
  for (std::size_t k = 0; k < basis.d; ++k) s.z[k] = zp[k] - zn[k];
  add_gaussian(model.gaussian_sigma2, basis, cfg, 0, s.z);
  return s;
}

CoefficientSample extend_dimension(const CoefficientSample& sample, const SplitModel& model,
                                   const KleBasis& new_basis, const ShotConfig& cfg) {
  if (new_basis.d < sample.d) throw std::invalid_argument("extend_dimension: new dimension is smaller");
  if (sample.z.size() != sample.d) throw std::invalid_argument("extend_dimension: malformed sample");
  if (new_basis.d == sample.d) return sample;
  if ((model.pos && !sample.record_pos) || (model.neg && !sample.record_neg)) {
    throw std::invalid_argument("extend_dimension: sample was drawn without keep_record");
  }
  if (cfg.seed != sample.seed) throw std::invalid_argument("extend_dimension: seed mismatch");

  const std::size_t k0 = sample.d;
  std::vector<double> zp(new_basis.d, 0.0);
  std::vector<double> zn(new_basis.d, 0.0);
  if (model.pos) {
    const auto [route, drift] = plan_part(*model.pos);
    extend_part(*model.pos, new_basis, cfg, route, drift, *sample.record_pos, k0, zp);
  }
  if (model.neg) {
    const auto [route, drift] = plan_part(*model.neg);
    extend_part(*model.neg, new_basis, cfg, route, drift, *sample.record_neg, k0, zn);
  }
  CoefficientSample out = sample;
  out.d = new_basis.d;
  out.z.resize(new_basis.d);
  for (std::size_t k = k0; k < new_basis.d; ++k) out.z[k] = zp[k] - zn[k];
  add_gaussian(model.gaussian_sigma2, new_basis, cfg, k0, out.z);
  return out;
}

PathApproximation reconstruct(const CoefficientSample& sample, const KleBasis& basis, std::span<const double> grid,
                              SumMode mode, double mean_rate) {
  if (sample.d != basis.d) throw std::invalid_argument("reconstruct: sample dimension does not match basis");
  return reconstruct(std::span<const double>(sample.z), basis, grid, mode, mean_rate);
}

}  // namespace kle
