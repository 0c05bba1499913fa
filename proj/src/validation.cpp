#include "kle/validation.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "kle/random.h"
#include "kle/stats.h"

namespace kle {

namespace {

// Seeds for the direct-series comparator are kept apart from the KLE samples.
constexpr std::uint64_t kComparatorSalt = 0x6f7261636c652d32ULL;

std::vector<double> column(const std::vector<std::vector<double>>& samples, std::size_t k) {
  std::vector<double> c(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) c[i] = samples[i][k];
  return c;
}

std::string format(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

template <class Fn>
std::vector<double> draw_scalars(std::size_t n, const McOptions& opts, std::uint64_t base, Fn fn) {
  auto chunks = parallel_chunks(n, opts.chunk, opts.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) out.push_back(fn(sample_seed(base, i)));
    return out;
  });
  std::vector<double> all;
  all.reserve(n);
  for (auto& c : chunks) all.insert(all.end(), c.begin(), c.end());
  return all;
}

CheckResult two_sample_mean(const std::string& name, std::span<const double> a, std::span<const double> b,
                            double n_se) {
  const MeanEstimate ea = mean_estimate(a);
  const MeanEstimate eb = mean_estimate(b);
  const double se = std::hypot(ea.se, eb.se);
  const double diff = std::abs(ea.mean - eb.mean);
  return {name, diff, n_se * se, diff <= n_se * se, format("%.6g vs %.6g", ea.mean, eb.mean)};
}

}  // namespace

std::vector<std::vector<double>> draw_coefficients(const SplitModel& model, const KleBasis& basis,
                                                   const McOptions& opts) {
  auto chunks = parallel_chunks(opts.n_samples, opts.chunk, opts.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<std::vector<double>> out;
    out.reserve(end - begin);
    ShotConfig cfg = opts.shot;
    cfg.keep_record = false;
    for (std::size_t i = begin; i < end; ++i) {
      cfg.seed = sample_seed(opts.seed, i);
      out.push_back(sample_coeffs(model, basis, cfg).z);
    }
    return out;
  });
  std::vector<std::vector<double>> all;
  all.reserve(opts.n_samples);
  for (auto& c : chunks) {
    for (auto& z : c) all.push_back(std::move(z));
  }
  return all;
}

std::vector<CheckResult> check_moments(const SplitModel& model, const KleBasis& basis,
                                       const std::vector<std::vector<double>>& samples, double n_se) {
  std::vector<CheckResult> out;
  const double n = static_cast<double>(samples.size());
  const KleBasis b(basis.T, basis.d, model.alpha());
  std::vector<std::vector<double>> cols;
  for (std::size_t k = 0; k < basis.d; ++k) cols.push_back(column(samples, k));
  for (std::size_t k = 1; k <= basis.d; ++k) {
    const MeanEstimate m = mean_estimate(cols[k - 1]);
    out.push_back({format("mean_Z%zu", k), std::abs(m.mean), n_se * m.se, std::abs(m.mean) <= n_se * m.se,
                   format("mean %.6g se %.3g", m.mean, m.se)});
  }
  for (std::size_t k = 1; k <= basis.d; ++k) {
    const MeanEstimate v = variance_estimate(cols[k - 1]);
    const double lambda = eigenvalue(k, b);
    const double dev = std::abs(v.mean - lambda);
    out.push_back({format("var_Z%zu", k), dev, n_se * v.se, dev <= n_se * v.se,
                   format("var %.6g lambda %.6g se %.3g", v.mean, lambda, v.se)});
  }
  // Uncorrelated is not independent: SE(corr) = sd(standardized product) / sqrt(N).
  for (std::size_t j = 1; j <= basis.d; ++j) {
    for (std::size_t k = j + 1; k <= basis.d; ++k) {
      const double r = correlation(cols[j - 1], cols[k - 1]);
      const double se = correlation_se(cols[j - 1], cols[k - 1]);
      out.push_back({format("corr_Z%zu_Z%zu", j, k), std::abs(r), n_se * se, std::abs(r) <= n_se * se,
                     format("corr %.4g se %.3g (1/sqrt(N) = %.3g)", r, se, 1.0 / std::sqrt(n))});
    }
  }
  return out;
}

CheckResult check_char_function(const SplitModel& model, const KleBasis& basis,
                                const std::vector<std::vector<double>>& samples, double scale, double n_se) {
  if (basis.d > 4) throw std::invalid_argument("check_char_function: grid is 3^d points; use d <= 4");
  std::size_t n_points = 1;
  for (std::size_t k = 0; k < basis.d; ++k) n_points *= 3;
  double worst = 0.0;
  std::vector<double> z(basis.d);
  for (std::size_t p = 0; p < n_points; ++p) {
    std::size_t code = p;
    for (std::size_t k = 0; k < basis.d; ++k) {
      z[k] = scale * (static_cast<double>(code % 3) - 1.0);
      code /= 3;
    }
    const Complex expected = std::exp(-coeff_char_exponent(model, basis, z));
    const Complex empirical = empirical_cf(std::span<const std::vector<double>>(samples), z);
    worst = std::max(worst, std::abs(empirical - expected));
  }
  const double tol = n_se / std::sqrt(static_cast<double>(samples.size()));
  return {"char_function", worst, tol, worst <= tol, format("%zu grid points", n_points)};
}

std::vector<CheckResult> check_dependence(const SplitModel& model, const KleBasis& basis,
                                          const std::vector<std::vector<double>>& samples, double n_se,
                                          double positive_se) {
  if (basis.d < 2) throw std::invalid_argument("check_dependence: need d >= 2");
  std::vector<double> s1 = column(samples, 0);
  std::vector<double> s2 = column(samples, 1);
  for (double& v : s1) v *= v;
  for (double& v : s2) v *= v;
  const MeanEstimate cov = covariance_estimate(s1, s2);
  const double kappa = mixed_fourth_cumulant(model, basis, 1, 2);
  const double dev = std::abs(cov.mean - kappa);
  std::vector<CheckResult> out;
  out.push_back({"cov_sq_matches_cumulant", dev, n_se * cov.se, dev <= n_se * cov.se,
                 format("cov %.6g kappa %.6g se %.3g", cov.mean, kappa, cov.se)});
  if (model.has_jumps()) {
    const bool pos = cov.mean > positive_se * cov.se;
    out.push_back({"cov_sq_positive", cov.mean / cov.se, positive_se, pos,
                   pos ? "dependent: positive" : "dependent: not resolved"});
  } else {
    const bool zero = std::abs(cov.mean) <= n_se * cov.se;
    out.push_back({"cov_sq_zero", std::abs(cov.mean) / cov.se, n_se, zero,
                   zero ? "independent: consistent" : "independent: violated"});
  }
  return out;
}

CheckResult check_marginal_ks(const SplitModel& model, double T, std::size_t d, const McOptions& opts,
                              double alpha) {
  const KleBasis basis(T, d, model.alpha());
  const std::array<double, 1> at_T{T};
  const std::vector<double> kle = draw_scalars(opts.n_samples, opts, opts.seed, [&](std::uint64_t seed) {
    ShotConfig cfg = opts.shot;
    cfg.seed = seed;
    cfg.keep_record = false;
    const CoefficientSample s = sample_coeffs(model, basis, cfg);
    return reconstruct(s, basis, at_T, SumMode::partial, 0.0).values[0];
  });
  const std::vector<double> direct =
      draw_scalars(opts.n_samples, opts, opts.seed ^ kComparatorSalt,
                   [&](std::uint64_t seed) { return direct_series_centered_endpoint(model, T, seed, opts.shot); });
  const KsResult ks = ks_two_sample(kle, direct);
  return {format("ks_marginal_T_d%zu", d), ks.p_value, alpha, ks.p_value >= alpha,
          format("D %.5g p %.4g N %zu", ks.statistic, ks.p_value, opts.n_samples)};
}

std::vector<CheckResult> check_brute_force(const LevyModel& model, const KleBasis& basis, const McOptions& opts,
                                           std::size_t grid_n, double n_se) {
  if (!model.tail().finite_activity()) throw std::invalid_argument("check_brute_force: needs finite activity");
  const SplitModel split = make_split(model);
  const double m = split.mean_rate();
  const KleBasis b(basis.T, basis.d, split.alpha());
  const auto shot = draw_coefficients(split, b, opts);

  auto chunks = parallel_chunks(opts.n_samples, opts.chunk, opts.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<std::vector<double>> out;
    for (std::size_t i = begin; i < end; ++i) {
      const JumpPath p = direct_series_path(model, b.T, sample_seed(opts.seed ^ kComparatorSalt, i), opts.shot);
      out.push_back(brute_force_coeffs(p, m, b, grid_n));
    }
    return out;
  });
  std::vector<std::vector<double>> brute;
  for (auto& c : chunks) {
    for (auto& z : c) brute.push_back(std::move(z));
  }

  std::vector<CheckResult> out;
  for (std::size_t k = 0; k < b.d; ++k) {
    out.push_back(two_sample_mean(format("brute_mean_Z%zu", k + 1), column(brute, k), column(shot, k), n_se));
  }
  for (std::size_t j = 0; j < b.d; ++j) {
    for (std::size_t k = j; k < b.d; ++k) {
      std::vector<double> pb(brute.size());
      std::vector<double> ps(shot.size());
      for (std::size_t i = 0; i < brute.size(); ++i) pb[i] = brute[i][j] * brute[i][k];
      for (std::size_t i = 0; i < shot.size(); ++i) ps[i] = shot[i][j] * shot[i][k];
      out.push_back(two_sample_mean(format("brute_second_Z%zu_Z%zu", j + 1, k + 1), pb, ps, n_se));
    }
  }
  return out;
}

CheckResult check_e1_roundtrip(const MonotoneInverseTable& table, std::size_t n_points, double tol) {
  const auto& xs = table.breakpoints();
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = std::log(*lo_it);
  const double hi = std::log(*hi_it);
  double worst = 0.0;
  for (std::size_t i = 0; i < n_points; ++i) {
    const double x = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_points - 1));
    const double err = std::abs(table(exp_integral_e1(x)) - x) / std::max(1.0, x);
    worst = std::max(worst, err);
  }
  return {"e1_roundtrip", worst, tol, worst <= tol, format("x in [%.3g, %.3g]", *lo_it, *hi_it)};
}

std::vector<CheckResult> run_validation_suites(const SplitModel& model, const ValidationPlan& plan) {
  std::vector<CheckResult> out;
  const KleBasis basis(plan.T, plan.d, model.alpha());
  const auto samples = draw_coefficients(model, basis, plan.mc);
  for (auto& r : check_moments(model, basis, samples)) out.push_back(std::move(r));

  const KleBasis small(plan.T, std::min<std::size_t>(plan.d, 3), model.alpha());
  std::vector<std::vector<double>> head;
  head.reserve(samples.size());
  for (const auto& z : samples) head.emplace_back(z.begin(), z.begin() + small.d);
  out.push_back(check_char_function(model, small, head));

  if (basis.d >= 2) {
    for (auto& r : check_dependence(model, basis, samples)) out.push_back(std::move(r));
  }

  const bool subordinator_parts = (!model.pos || model.pos->triple().cutoff == Cutoff::h0) &&
                                  (!model.neg || model.neg->triple().cutoff == Cutoff::h0);
  if (subordinator_parts) {
    McOptions ks = plan.mc;
    ks.n_samples = plan.ks_samples;
    out.push_back(check_marginal_ks(model, plan.T, plan.ks_d, ks));
  } else {
    out.push_back({"ks_marginal_T", 0.0, 0.0, true, "skipped: jump part is not a subordinator"});
  }

  out.push_back(check_e1_roundtrip(default_e1_inverse()));
  return out;
}

nlohmann::json report_json(const std::vector<CheckResult>& results) {
  nlohmann::json checks = nlohmann::json::array();
  bool all = true;
  for (const auto& r : results) {
    checks.push_back({{"name", r.name},
                      {"statistic", r.statistic},
                      {"tolerance", r.tolerance},
                      {"passed", r.passed},
                      {"detail", r.detail}});
    all = all && r.passed;
  }
  return {{"passed", all}, {"checks", checks}};
}

}  // namespace kle
