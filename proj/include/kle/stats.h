#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace kle {

/// Neumaier-compensated sum.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void merge(const KahanSum& other) {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Sample mean and its standard error.
struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

/// Running first and second moments of a scalar, mergeable in a fixed order.
class ScalarMoments {
 public:
  void add(double x) {
    ++n_;
    s1_.add(x);
    s2_.add(x * x);
  }
  void merge(const ScalarMoments& o) {
    n_ += o.n_;
    s1_.merge(o.s1_);
    s2_.merge(o.s2_);
  }
  std::size_t count() const { return n_; }
  double mean() const { return n_ ? s1_.value() / n_ : 0.0; }
  /// Unbiased sample variance.
  double variance() const {
    if (n_ < 2) return 0.0;
    const double m = mean();
    return std::max(0.0, (s2_.value() - n_ * m * m) / (n_ - 1));
  }
  MeanEstimate estimate() const { return {mean(), std::sqrt(variance() / std::max<std::size_t>(n_, 1)), n_}; }

 private:
  std::size_t n_ = 0;
  KahanSum s1_;
  KahanSum s2_;
};

MeanEstimate mean_estimate(std::span<const double> x);

/// Unbiased variance estimate and its standard error from the fourth central moment.
MeanEstimate variance_estimate(std::span<const double> x);

/// Covariance estimate of (x, y) with the standard error of the mean of the centered products.
MeanEstimate covariance_estimate(std::span<const double> x, std::span<const double> y);

double correlation(std::span<const double> x, std::span<const double> y);

/// Standard error of the sample correlation near zero: sd of the
/// standardized products over sqrt(N). Not 1/sqrt(N) unless x and y are independent.
double correlation_se(std::span<const double> x, std::span<const double> y);

}  // namespace kle
