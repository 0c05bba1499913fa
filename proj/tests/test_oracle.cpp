#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "kle/oracle.h"
#include "kle/random.h"
#include "kle/stats.h"
#include "kle/validation.h"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace kle;

namespace {

constexpr double kPi = std::numbers::pi;

// \int_0^T t e_k(t) dt
double t_projection(std::size_t k, double T) {
  const double h = k - 0.5;
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;
  return sign * std::sqrt(2.0) * std::pow(T, 1.5) / (kPi * kPi * h * h);
}

}  // namespace

TEST_CASE("coefficient characteristic exponent", "[oracle]") {
  const SplitModel bm = make_split(make_brownian(1.0));
  const KleBasis b(1.0, 3, 1.0);
  const std::vector<double> zero{0.0, 0.0, 0.0};
  CHECK(coeff_char_exponent(bm, b, zero) == Complex(0.0));

  const std::vector<double> e1{1.0, 0.0, 0.0};
  CHECK_THAT(coeff_char_exponent(bm, b, e1).real(), WithinRel(0.5 * 4.0 / (kPi * kPi), 1e-12));

  // Brownian: Psi_xi(z) = sum_k lambda_k z_k^2 / 2
  const std::vector<double> z{0.4, -1.1, 2.0};
  double expected = 0.0;
  for (std::size_t k = 1; k <= 3; ++k) expected += 0.5 * eigenvalue(k, b) * z[k - 1] * z[k - 1];
  CHECK_THAT(coeff_char_exponent(bm, b, z).real(), WithinRel(expected, 1e-11));

  const SplitModel vg = make_variance_gamma(1.0, 1.0, 1.0, 2.0);
  const std::vector<double> neg{-0.4, 1.1, -2.0};
  const Complex p = coeff_char_exponent(vg, b, z);
  const Complex q = coeff_char_exponent(vg, b, neg);
  CHECK(std::abs(q - std::conj(p)) < 1e-12);
  CHECK(p.real() > 0.0);
  CHECK_THROWS_AS(coeff_char_exponent(vg, b, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("small-z exponent is the quadratic form of the covariance", "[oracle]") {
  // Psi_xi(eps z) ~ eps^2 sum lambda_k z_k^2 / 2 for any centered model
  const SplitModel vg = make_variance_gamma(1.0, 1.0, 1.0, 2.0);
  const KleBasis b(1.0, 2, vg.alpha());
  const double eps = 1e-3;
  const std::vector<double> z{eps, -eps};
  const double quad_form = 0.5 * (eigenvalue(1, b) + eigenvalue(2, b)) * eps * eps;
  CHECK_THAT(coeff_char_exponent(vg, b, z).real(), WithinRel(quad_form, 1e-3));
}

TEST_CASE("empirical characteristic function", "[oracle]") {
  const std::vector<std::vector<double>> zero_sample{{0.0, 0.0}};
  const std::vector<double> z{1.0, 2.0};
  CHECK(empirical_cf(std::span<const std::vector<double>>(zero_sample), z) == Complex(1.0, 0.0));
  std::vector<std::vector<double>> many;
  for (int i = 0; i < 50; ++i) many.push_back({0.1 * i, -0.07 * i});
  CHECK(std::abs(empirical_cf(std::span<const std::vector<double>>(many), z)) <= 1.0);
  const std::vector<std::vector<double>> none;
  CHECK_THROWS_AS(empirical_cf(std::span<const std::vector<double>>(none), z), std::invalid_argument);
}

TEST_CASE("empirical CF of VG coefficients matches exp(-Psi_xi)", "[oracle][statistical]") {
  const SplitModel vg = make_variance_gamma(1.0, 1.0, 1.0, 2.0);
  const KleBasis b(1.0, 3, vg.alpha());
  McOptions o;
  o.n_samples = 20000;
  o.seed = 99;
  const auto r = check_char_function(vg, b, draw_coefficients(vg, b, o));
  INFO(r.detail << " worst " << r.statistic);
  CHECK(r.passed);
}

TEST_CASE("direct series of a subordinator", "[oracle]") {
  const LevyModel cp = make_cp_exponential(2.0, 1.0);
  ShotConfig cfg;
  CHECK(direct_series_subordinator(cp, 1.0, 0.0, 5, cfg) == 0.0);
  double prev = 0.0;
  for (double t = 0.05; t <= 1.0; t += 0.05) {
    const double v = direct_series_subordinator(cp, 1.0, t, 5, cfg);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK_THROWS_AS(direct_series_subordinator(cp, 1.0, 1.5, 5, cfg), std::domain_error);

  const LevyModel g = make_gamma(1.0, 1.0);
  const JumpPath p = direct_series_path(g, 1.0, 3, cfg);
  CHECK(std::is_sorted(p.times.begin(), p.times.end()));
  for (double x : p.sizes) CHECK(x > 0.0);
}

TEST_CASE("direct series reproduces compound Poisson moments", "[oracle][statistical]") {
  const double rate = 2.0;
  const double rho = 1.5;
  const double T = 1.3;
  const LevyModel cp = make_cp_exponential(rate, rho);
  ShotConfig cfg;
  ScalarMoments m;
  for (std::uint64_t i = 0; i < 100000; ++i) m.add(direct_series_subordinator(cp, T, T, sample_seed(8, i), cfg));
  const MeanEstimate e = m.estimate();
  CHECK(std::abs(e.mean - T * rate / rho) <= 4.0 * e.se);
  // Var = T rate E[J^2] = T rate 2 / rho^2
  CHECK_THAT(m.variance(), WithinRel(T * rate * 2.0 / (rho * rho), 0.03));
}

TEST_CASE("direct series for gamma has mean T c / rho", "[oracle][statistical]") {
  const LevyModel g = make_gamma(2.0, 1.0);
  ShotConfig cfg;
  ScalarMoments m;
  for (std::uint64_t i = 0; i < 20000; ++i) m.add(direct_series_subordinator(g, 1.0, 1.0, sample_seed(4, i), cfg));
  const MeanEstimate e = m.estimate();
  CHECK(std::abs(e.mean - 2.0) <= 4.0 * e.se);
  CHECK_THAT(m.variance(), WithinRel(2.0, 0.05));
}

TEST_CASE("standard-library compound Poisson paths", "[oracle][statistical]") {
  ScalarMoments n;
  for (std::uint64_t i = 0; i < 20000; ++i) n.add(static_cast<double>(compound_poisson_path(3.0, 1.0, 2.0, i).times.size()));
  const MeanEstimate e = n.estimate();
  CHECK(std::abs(e.mean - 6.0) <= 4.0 * e.se);
  const JumpPath p = compound_poisson_path(3.0, 1.0, 2.0, 1);
  CHECK(std::is_sorted(p.times.begin(), p.times.end()));
}

TEST_CASE("brute-force coefficients of simple paths", "[oracle]") {
  const KleBasis b(1.5, 6);
  const double m = 0.8;

  const JumpPath empty{b.T, {}, {}};
  const auto z0 = brute_force_coeffs(empty, m, b, 2001);
  for (std::size_t k = 1; k <= b.d; ++k) CHECK_THAT(z0[k - 1], WithinAbs(-m * t_projection(k, b.T), 1e-11));

  const double x = 1.7;
  const double s = 0.6;
  const JumpPath one{b.T, {s}, {x}};
  const auto z1 = brute_force_coeffs(one, m, b, 2001);
  for (std::size_t k = 1; k <= b.d; ++k) {
    CHECK_THAT(z1[k - 1], WithinAbs(x * integrated_eigenfunction(k, s, b) - m * t_projection(k, b.T), 1e-11));
  }

  // two jumps superpose
  const JumpPath two{b.T, {0.2, 1.1}, {0.5, -0.3}};
  const auto z2 = brute_force_coeffs(two, 0.0, b, 3);
  const auto f1 = f_map(0.5, 0.2, b);
  const auto f2 = f_map(-0.3, 1.1, b);
  for (std::size_t k = 0; k < b.d; ++k) CHECK_THAT(z2[k], WithinAbs(f1[k] + f2[k], 1e-13));
  CHECK_THROWS_AS(brute_force_coeffs(empty, m, b, 2), std::invalid_argument);
}

TEST_CASE("brute-force path integration matches the shot-noise sampler on one stream", "[oracle]") {
  const LevyModel cp = make_cp_exponential(2.0, 1.0);
  const SplitModel split = make_split(cp);
  const KleBasis b(1.0, 5, split.alpha());
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    ShotConfig cfg;
    cfg.seed = seed;
    cfg.keep_record = true;
    const auto s = sample_coeffs(split, b, cfg);
    const JumpPath p = jump_path_from_record(cp, b.T, *s.record_pos);
    const auto z = brute_force_coeffs(p, split.mean_rate(), b, 4001);
    for (std::size_t k = 0; k < b.d; ++k) CHECK_THAT(z[k], WithinAbs(s.z[k], 1e-10));
  }
}

TEST_CASE("brute-force and shot-noise moments agree for compound Poisson", "[oracle][statistical]") {
  McOptions o;
  o.n_samples = 10000;
  o.seed = 321;
  for (const auto& r : check_brute_force(make_cp_exponential(2.0, 1.0), KleBasis(1.0, 5), o)) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}

TEST_CASE("two-sample KS statistic and p-value", "[oracle][ks]") {
  std::vector<double> a(200);
  std::vector<double> b(300);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = i / 100.0;
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = (i + 0.5) / 100.0 * 0.9 + 0.1;
  // scipy.stats.ks_2samp statistic
  CHECK_THAT(ks_two_sample(a, b).statistic, WithinAbs(0.3, 1e-12));
  CHECK(ks_two_sample(a, a).statistic == 0.0);
  CHECK(ks_two_sample(a, a).p_value == 1.0);

  // scipy.stats.kstwobign.sf
  CHECK_THAT(kolmogorov_survival(0.5), WithinRel(0.9639452436648751, 1e-10));
  CHECK_THAT(kolmogorov_survival(1.0), WithinRel(0.26999967167735456, 1e-10));
  CHECK_THAT(kolmogorov_survival(1.36), WithinRel(0.049485876755377876, 1e-10));

  std::vector<double> small(50, 1.0);
  CHECK_THROWS_AS(ks_two_sample(small, a), std::invalid_argument);
}

TEST_CASE("KS separates disjoint supports", "[oracle][ks]") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> a(1000);
  std::vector<double> b(1000);
  for (auto& v : a) v = u(rng);
  for (auto& v : b) v = u(rng) + 1.0;
  const KsResult r = ks_two_sample(a, b);
  CHECK(r.statistic == 1.0);
  CHECK(r.p_value < 1e-6);
}

TEST_CASE("KS null calibration", "[oracle][ks][statistical]") {
  // rejections at 1% over 200 normal-vs-normal pairs; Binomial(200, 0.01) rarely exceeds 8
  int rejected = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(sample_seed(1234, seed));
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> a(1000);
    std::vector<double> b(1000);
    for (auto& v : a) v = n(rng);
    for (auto& v : b) v = n(rng);
    if (ks_two_sample(a, b).p_value < 0.01) ++rejected;
  }
  CHECK(rejected <= 8);
}

TEST_CASE("mixed fourth cumulant", "[oracle]") {
  const KleBasis b(1.0, 5);
  CHECK(mixed_fourth_cumulant(make_split(make_brownian(1.0)), b, 1, 2) == 0.0);

  // separable form: (2T/pi^2)^2 / ((j-1/2)^2 (k-1/2)^2) \int x^4 nu(dx) \int cos^2 cos^2 dt, the last being T/4
  const SplitModel vg = make_variance_gamma(1.0, 1.0, 1.0, 2.0);
  const double x4 = 6.0 * 1.0 / 1.0 + 6.0 * 1.0 / 16.0;
  for (auto [j, k] : {std::pair<std::size_t, std::size_t>{1, 2}, {1, 3}, {2, 5}}) {
    for (double T : {1.0, 2.0}) {
      const KleBasis bt(T, 5);
      const double hj = j - 0.5;
      const double hk = k - 0.5;
      const double separable = std::pow(2.0 * T / (kPi * kPi), 2) / (hj * hj * hk * hk) * x4 * T / 4.0;
      CHECK_THAT(mixed_fourth_cumulant(vg, bt, j, k), WithinRel(separable, 1e-8));
    }
  }
  CHECK(mixed_fourth_cumulant(vg, b, 1, 2) > 0.0);
  CHECK_THROWS_AS(mixed_fourth_cumulant(vg, b, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(mixed_fourth_cumulant(vg, b, 0, 2), std::invalid_argument);
}

TEST_CASE("squared coefficients are dependent for VG and not for Brownian motion", "[oracle][statistical]") {
  McOptions o;
  o.n_samples = 40000;
  o.seed = 5;
  const SplitModel vg = make_variance_gamma(1.0, 1.0, 1.0, 2.0);
  const KleBasis bv(1.0, 2, vg.alpha());
  for (const auto& r : check_dependence(vg, bv, draw_coefficients(vg, bv, o))) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
  const SplitModel bm = make_split(make_brownian(1.0));
  const KleBasis bb(1.0, 2, 1.0);
  const auto res = check_dependence(bm, bb, draw_coefficients(bm, bb, o));
  for (const auto& r : res) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
  CHECK(res.back().detail == "independent: consistent");
}

TEST_CASE("marginal at T: KLE partial sums against the direct series", "[oracle][statistical]") {
  McOptions o;
  o.n_samples = 2000;
  o.seed = 7;
  const auto r = check_marginal_ks(make_split(make_gamma(1.0, 1.0)), 1.0, 300, o);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("statistics helpers", "[oracle][stats]") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y{2.0, 4.0, 6.0, 8.0};
  CHECK_THAT(mean_estimate(x).mean, WithinRel(2.5, 1e-15));
  CHECK_THAT(variance_estimate(x).mean, WithinRel(5.0 / 3.0, 1e-15));
  CHECK_THAT(covariance_estimate(x, y).mean, WithinRel(10.0 / 3.0, 1e-15));
  CHECK_THAT(correlation(x, y), WithinRel(1.0, 1e-15));
  KahanSum k;
  k.add(1e16);
  for (int i = 0; i < 1000; ++i) k.add(1.0);
  k.add(-1e16);
  CHECK(k.value() == 1000.0);
}
