#include <catch_amalgamated.hpp>

#include <boost/math/special_functions/expint.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "kle/special_fn.h"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace kle;

namespace {

struct Pair {
  double x;
  double e1;
};

// scipy.special.exp1
constexpr Pair kE1Reference[] = {
    {1e-20, 45.474486194979384}, {1e-10, 22.448635265138922}, {1e-3, 6.331539364136149},
    {0.1, 1.8229239584193906},   {0.5, 0.5597735947761608},   {1.0, 0.2193839343955205},
    {1.5, 0.10001958240663265},  {2.0, 0.048900510708061125}, {5.0, 0.0011482955912753257},
    {10.0, 4.156968929685325e-06}, {30.0, 3.021552010688813e-15}, {45.0, 6.225690809462383e-22},
    {100.0, 3.683597761682032e-46}, {700.0, 1.406518766234033e-307},
};

}  // namespace

TEST_CASE("E1 matches reference values across its range", "[special_fn]") {
  for (const auto& p : kE1Reference) {
    INFO("x = " << p.x);
    CHECK_THAT(exp_integral_e1(p.x), WithinRel(p.e1, 1e-13));
  }
}

TEST_CASE("E1 agrees with boost expint and with direct quadrature", "[special_fn]") {
  for (double x : {1e-6, 0.01, 0.3, 0.99, 1.01, 3.0, 17.0, 44.0}) {
    INFO("x = " << x);
    CHECK_THAT(exp_integral_e1(x), WithinRel(-boost::math::expint(-x), 1e-13));
    const double q = quad([](double s) { return std::exp(-s) / s; }, x, std::numeric_limits<double>::infinity(), 1e-13);
    CHECK_THAT(exp_integral_e1(x), WithinRel(q, 1e-11));
  }
}

TEST_CASE("E1 small-argument expansion", "[special_fn]") {
  for (double x : {1e-15, 1e-12, 1e-9}) {
    CHECK_THAT(exp_integral_e1(x), WithinRel(-kEulerGamma - std::log(x) + x, 1e-14));
  }
}

TEST_CASE("E1 rejects non-positive arguments", "[special_fn]") {
  CHECK_THROWS_AS(exp_integral_e1(0.0), std::domain_error);
  CHECK_THROWS_AS(exp_integral_e1(-1.0), std::domain_error);
  CHECK_THROWS_AS(exp_integral_e1(std::nan("")), std::domain_error);
}

TEST_CASE("E1 is strictly decreasing", "[special_fn]") {
  double prev = exp_integral_e1(1e-25);
  for (double x = 1e-25; x < 600.0; x *= 1.37) {
    const double v = exp_integral_e1(x * 1.37);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("invert_monotone solves decreasing equations", "[special_fn]") {
  auto e1 = [](double x) { return exp_integral_e1(x); };
  // scipy brentq on exp1
  CHECK_THAT(invert_monotone(e1, 2.0, 1e-10, 10.0), WithinRel(0.08237202962072027, 1e-11));
  CHECK_THAT(invert_monotone(e1, 1.0, 1e-10, 10.0), WithinRel(0.26473701045154324, 1e-11));
  CHECK_THAT(invert_monotone(e1, 1e-5, 1e-3, 100.0), WithinRel(9.19891431046614, 1e-11));
  CHECK_THAT(invert_monotone(e1, 45.47, 1e-300, 1.0), WithinRel(1.0044962730171234e-20, 1e-10));

  auto cube = [](double x) { return -x * x * x; };
  CHECK_THAT(invert_monotone(cube, -8.0, 0.0, 5.0), WithinRel(2.0, 1e-12));
}

TEST_CASE("invert_monotone returns bracket endpoints exactly", "[special_fn]") {
  auto f = [](double x) { return 1.0 - x; };
  CHECK(invert_monotone(f, 1.0, 0.0, 1.0) == 0.0);
  CHECK(invert_monotone(f, 0.0, 0.0, 1.0) == 1.0);
}

TEST_CASE("invert_monotone reports a bracket that misses the value", "[special_fn]") {
  auto e1 = [](double x) { return exp_integral_e1(x); };
  CHECK_THROWS_AS(invert_monotone(e1, 100.0, 1e-10, 10.0), BracketError);
  CHECK_THROWS_AS(invert_monotone(e1, 1e-30, 1e-10, 10.0), BracketError);
}

TEST_CASE("default E1 inverse table honors the build contract", "[special_fn][table]") {
  const MonotoneInverseTable& t = default_e1_inverse();
  REQUIRE(t.breakpoints().size() == E1TableDefaults::n_points);
  CHECK(t.max_breakpoint_gap() <= E1TableDefaults::max_spacing);
  CHECK(t.max_value_gap() <= E1TableDefaults::max_spacing);
  CHECK_THAT(t.domain_hi(), WithinRel(45.47, 1e-12));
  CHECK_THAT(t.domain_lo(), WithinRel(6.226e-22, 1e-12));
  CHECK(t.interpolation_order() == 3);
  // breakpoints strictly increasing, values strictly decreasing
  const auto& x = t.breakpoints();
  const auto& y = t.values();
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1]) || !(y[i] < y[i - 1])) FAIL("table not strictly monotone at " << i);
  }
}

TEST_CASE("E1 inverse roundtrips over the gamma-example domain", "[special_fn][table]") {
  const MonotoneInverseTable& t = default_e1_inverse();
  double worst = 0.0;
  for (double lx = std::log(1e-20); lx <= std::log(45.47); lx += 0.0173) {
    const double x = std::exp(lx);
    worst = std::max(worst, std::abs(t(exp_integral_e1(x)) - x) / std::max(1.0, x));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("E1 inverse roundtrips the other way", "[special_fn][table]") {
  const MonotoneInverseTable& t = default_e1_inverse();
  for (double ly = std::log(6.3e-22); ly < std::log(45.4); ly += 0.731) {
    const double y = std::exp(ly);
    INFO("y = " << y);
    CHECK_THAT(exp_integral_e1(t(y)), WithinRel(y, 1e-9));
  }
}

TEST_CASE("interpolation alone is already accurate", "[special_fn][table]") {
  const MonotoneInverseTable& t = default_e1_inverse();
  for (double y : {40.0, 3.0, 0.5, 1e-3, 1e-12, 1e-20}) {
    const double x = t.interpolate(y);
    CHECK_THAT(exp_integral_e1(x), WithinRel(y, 1e-7));
  }
}

TEST_CASE("E1 inverse outside the tabulated values", "[special_fn][table]") {
  const MonotoneInverseTable& t = default_e1_inverse();
  CHECK(t(50.0) == t.breakpoints().front());
  CHECK(t(1e6) == t.breakpoints().front());
  // E1(45.47) lies below domain_lo; the table inverts it exactly
  const double y = exp_integral_e1(45.47);
  REQUIRE(y < t.domain_lo());
  CHECK_THAT(t(y), WithinRel(45.47, 1e-10));
  CHECK_THROWS_AS(t(0.0), std::domain_error);
  CHECK_THROWS_AS(t(-1.0), std::domain_error);
}

TEST_CASE("table build rejects impossible settings", "[special_fn][table]") {
  CHECK_THROWS_AS(build_e1_inverse(1e-20, 40.0, 1000, 0.00231), std::invalid_argument);
  CHECK_THROWS_AS(build_e1_inverse(10.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_e1_inverse(1e-20, 40.0, 3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_e1_inverse(1e-20, 40.0, 1000, 0.0), std::invalid_argument);
}

TEST_CASE("small tables follow the same spacing rule", "[special_fn][table]") {
  const auto t = build_e1_inverse(1e-5, 5.0, 5000, 0.01);
  CHECK(t.max_breakpoint_gap() <= 0.01);
  CHECK(t.max_value_gap() <= 0.01);
  for (double y : {4.0, 1.0, 0.01, 2e-5}) CHECK_THAT(exp_integral_e1(t(y)), WithinRel(y, 1e-9));
}

TEST_CASE("from_pairs rebuilds an equivalent table", "[special_fn][table]") {
  const auto t = build_e1_inverse(1e-5, 5.0, 5000, 0.01);
  const auto u = MonotoneInverseTable::from_pairs(t.breakpoints(), t.values());
  for (double y : {4.0, 1.0, 0.01, 2e-5}) CHECK_THAT(u(y), WithinRel(t.interpolate(y), 1e-15));
  CHECK_THROWS_AS(MonotoneInverseTable::from_pairs({1.0, 2.0, 3.0, 4.0}, {4.0, 3.0, 3.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(MonotoneInverseTable::from_pairs({1.0, 2.0}, {2.0, 1.0}), std::invalid_argument);
}

TEST_CASE("quad integrates smooth, endpoint-singular and infinite-range integrands", "[special_fn][quad]") {
  CHECK_THAT(quad([](double x) { return std::sin(x); }, 0.0, std::numbers::pi), WithinRel(2.0, 1e-12));
  CHECK_THAT(quad([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10), WithinRel(2.0, 1e-9));
  CHECK_THAT(quad([](double x) { return std::exp(-x * x); }, -std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity()),
             WithinRel(std::sqrt(std::numbers::pi), 1e-12));
  CHECK_THAT(quad([](double x) { return x * std::exp(-x); }, 3.0, std::numeric_limits<double>::infinity()),
             WithinRel(4.0 * std::exp(-3.0), 1e-12));
}

TEST_CASE("quad handles zero-valued and complex integrals", "[special_fn][quad]") {
  CHECK_THAT(quad([](double x) { return std::sin(x); }, -2.0, 2.0), WithinAbs(0.0, 1e-14));
  const auto v = quad([](double x) { return std::exp(std::complex<double>(0.0, x)); }, 0.0, std::numbers::pi / 2);
  CHECK_THAT(v.real(), WithinRel(1.0, 1e-12));
  CHECK_THAT(v.imag(), WithinRel(1.0, 1e-12));
  CHECK(quad([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
  CHECK_THAT(quad([](double) { return 1.0; }, 3.0, 1.0), WithinRel(-2.0, 1e-14));
}

TEST_CASE("quad reports non-convergence with its best estimate", "[special_fn][quad]") {
  auto wild = [](double x) { return std::sin(1.0 / x) / x; };
  try {
    (void)quad(wild, 1e-8, 1.0, 1e-14, 20);
    FAIL("expected QuadratureError");
  } catch (const QuadratureError& e) {
    CHECK(e.achieved_rtol() > 1e-14);
    CHECK(std::isfinite(e.estimate().real()));
  }
}
