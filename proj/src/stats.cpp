#include "kle/stats.h"

#include <stdexcept>

namespace kle {

namespace {

double kahan_mean(std::span<const double> x) {
  KahanSum s;
  for (double v : x) s.add(v);
  return s.value() / static_cast<double>(x.size());
}

// Mean of p with its standard error.
MeanEstimate estimate_of(const std::vector<double>& p) {
  ScalarMoments m;
  for (double v : p) m.add(v);
  return m.estimate();
}

}  // namespace

MeanEstimate mean_estimate(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean_estimate: empty sample");
  ScalarMoments m;
  for (double v : x) m.add(v);
  return m.estimate();
}

MeanEstimate variance_estimate(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("variance_estimate: need at least two samples");
  const double m = kahan_mean(x);
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - m) * (x[i] - m);
  MeanEstimate e = estimate_of(sq);
  e.mean *= static_cast<double>(x.size()) / static_cast<double>(x.size() - 1);
  return e;
}

MeanEstimate covariance_estimate(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("covariance_estimate: bad sample sizes");
  const double mx = kahan_mean(x);
  const double my = kahan_mean(y);
  std::vector<double> p(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) p[i] = (x[i] - mx) * (y[i] - my);
  MeanEstimate e = estimate_of(p);
  e.mean *= static_cast<double>(x.size()) / static_cast<double>(x.size() - 1);
  return e;
}

double correlation(std::span<const double> x, std::span<const double> y) {
  const double cxy = covariance_estimate(x, y).mean;
  const double vx = covariance_estimate(x, x).mean;
  const double vy = covariance_estimate(y, y).mean;
  if (vx == 0.0 || vy == 0.0) return 0.0;
  return cxy / std::sqrt(vx * vy);
}

double correlation_se(std::span<const double> x, std::span<const double> y) {
  const MeanEstimate vx = variance_estimate(x);
  const MeanEstimate vy = variance_estimate(y);
  if (vx.mean == 0.0 || vy.mean == 0.0) return 0.0;
  const double mx = kahan_mean(x);
  const double my = kahan_mean(y);
  const double scale = 1.0 / std::sqrt(vx.mean * vy.mean);
  std::vector<double> p(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) p[i] = (x[i] - mx) * (y[i] - my) * scale;
  return estimate_of(p).se;
}

}  // namespace kle
