#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kle/kle_basis.h"
#include "kle/levy_models.h"
#include "kle/random.h"

namespace kle {

struct ShotConfig {
  std::uint64_t seed = 0;
  /// Gamma-type models stop once Gamma_i / (T c) exceeds this.
  double gamma_cutoff = E1TableDefaults::domain_hi;
  /// Other infinite-activity models stop once g^{-1}(Gamma_i / T) falls below this.
  double jump_floor = 1e-19;
  std::size_t max_terms = 10'000'000;
  double centering_rtol = 1e-10;
  /// Retain the (Gamma_i, U_i) stream so the sample can be extended later.
  bool keep_record = false;
};

/// The arrivals actually consumed by one series, in order.
struct ShotRecord {
  std::vector<double> gammas;
  std::vector<double> uniforms;

  std::size_t size() const { return gammas.size(); }
};

/// Unit-rate Poisson arrival times Gamma_1 < Gamma_2 < ... paired with iid U_i ~ U[0, 1).
class ArrivalStream {
 public:
  struct Arrival {
    double gamma;
    double u;
  };

  explicit ArrivalStream(std::uint64_t seed) : engine_(seed) {}

  Arrival next() {
    gamma_ += -std::log(to_open_unit_interval(engine_()));
    return {gamma_, to_unit_interval(engine_())};
  }

  /// The next n arrivals.
  ShotRecord take(std::size_t n);

 private:
  std::mt19937_64 engine_;
  double gamma_ = 0.0;
};

/// First `cap` arrivals of the stream seeded with `seed`.
ShotRecord arrival_stream(std::uint64_t seed, std::size_t cap);

struct CoefficientSample {
  std::vector<double> z;
  std::size_t d = 0;
  std::size_t n_terms_pos = 0;
  std::size_t n_terms_neg = 0;
  std::uint64_t seed = 0;
  std::optional<ShotRecord> record_pos;
  std::optional<ShotRecord> record_neg;
};

/// Raised when a series exceeds ShotConfig::max_terms.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(std::size_t terms, double last_gamma)
      : std::runtime_error("shot-noise series exceeded max_terms (" + std::to_string(terms) +
                           " terms, last Gamma " + std::to_string(last_gamma) + ")"),
        terms_(terms),
        last_gamma_(last_gamma) {}

  std::size_t terms() const { return terms_; }
  double last_gamma() const { return last_gamma_; }

 private:
  std::size_t terms_;
  double last_gamma_;
};

/// Z^(d) = a + sum_i H(Gamma_i, U_i) for a positive-jump model with h = 0 triple.
/// Uses the positive-jump stream derived from cfg.seed.
CoefficientSample sample_coeffs_finite_variation(const LevyModel& model, const KleBasis& basis,
                                                 const ShotConfig& cfg);

/// Z^(d) = sum_{i<=n} H(Gamma_i, U_i) - C(n) for a positive-jump model read as (0, 0, pi) with h = 1.
CoefficientSample sample_coeffs_centered(const LevyModel& model, const KleBasis& basis, const ShotConfig& cfg);

/// Z^(d) = Z+ - Z- + G for a composite model; parts are centered before sampling.
CoefficientSample sample_coeffs(const SplitModel& model, const KleBasis& basis, const ShotConfig& cfg);

/// Appends Z_{d+1..new_d} from the retained streams; bit-identical to a fresh
/// sample_coeffs call at new_basis.d with the same seed and configuration.
CoefficientSample extend_dimension(const CoefficientSample& sample, const SplitModel& model,
                                   const KleBasis& new_basis, const ShotConfig& cfg);

/// True once an arrival can no longer contribute: past the support of a
/// finite-activity model, past the gamma cutoff, or below the jump floor.
bool series_exhausted(const TailIntegral& tail, double T, double gamma, const ShotConfig& cfg);

/// \int_0^s g^{-1}(r/T) 1(0 < r < T g(0)) dr.
double centering_radial_integral(const LevyModel& model, double T, double s, double rtol = 1e-10);

/// The centering function C(s) of the h = 1 series.
std::vector<double> centering_vector(const LevyModel& model, const KleBasis& basis, double s, double rtol = 1e-10);

/// Path reconstruction from a coefficient sample.
PathApproximation reconstruct(const CoefficientSample& sample, const KleBasis& basis, std::span<const double> grid,
                              SumMode mode, double mean_rate);

}  // namespace kle
