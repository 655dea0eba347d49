#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bohmfol/fields.hpp"
#include "bohmfol/rng.hpp"
#include "bohmfol/trajectories.hpp"

namespace bohmfol::ensemble {

using fields::SpinAxis;
using fields::SpinOutcome;
using fields::WaveguideModel;
using trajectories::IntegratorConfig;

/// Initial position drawn from |Psi_0|^2.
Vec3 sample_initial(const WaveguideModel &m, rng::Stream &rng);

/// Stern-Gerlach outcome: Up or Down with probability 1/2 each.
SpinOutcome sg_outcome(rng::Stream &rng);

/// Which field guides particle 2 over a whole ensemble.
struct EnsembleScenario {
  enum class Order { AliceFirst, BobFirst };

  Order order{Order::BobFirst};
  SpinAxis axis{SpinAxis::Z()};
  /// Alice-first only: when empty, each pair draws its own outcome.
  std::optional<SpinOutcome> fixed_outcome;

  static EnsembleScenario alice_first(const SpinAxis &axis) {
    return {Order::AliceFirst, axis, std::nullopt};
  }
  static EnsembleScenario alice_first(const SpinAxis &axis, SpinOutcome s) {
    return {Order::AliceFirst, axis, s};
  }
  static EnsembleScenario bob_first() { return {}; }
};

std::string to_string(const EnsembleScenario &s);

struct BinSpec {
  std::size_t count{200};
  double hi{0.0}; ///< upper edge of the uniform bins; <= 0 means t_max
};

struct ArrivalHistogram {
  std::vector<double> bin_edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t n_total{0};
  std::uint64_t n_no_arrival{0};
  std::vector<double> raw_taus; ///< arrival times in trajectory order

  // per-trajectory diagnostics
  std::uint64_t n_backflow{0}; ///< trajectories with min v_z < 0
  std::uint64_t n_wall_guard{0};
  double max_rho_drift{0.0};

  [[nodiscard]] std::vector<double> sorted_taus() const;
  [[nodiscard]] double backflow_fraction() const;
};

/// `tau_lo,tau_hi,count` rows, then `no_arrival,,<count>`; 17 significant
/// digits and '\n' line endings.
void write_csv(std::ostream &os, const ArrivalHistogram &h);

/// Runs n independent trajectories, trajectory i using substream (seed, i),
/// and histograms the first-arrival times at z = L. Failing trajectories are
/// reported as TrajectoryFailure naming the index.
ArrivalHistogram arrival_distribution(const WaveguideModel &m,
                                      const EnsembleScenario &scenario,
                                      std::size_t n, std::uint64_t seed,
                                      const IntegratorConfig &cfg,
                                      const BinSpec &bins = {},
                                      unsigned threads = 0);

/// Throws NoArrivals.
double empirical_tau_max(const ArrivalHistogram &h);

/// Fraction of the ensemble arriving after tau_c or not at all.
double tail_mass(const ArrivalHistogram &h, double tau_c);

enum class DistributionClass { Exotic, HeavyTailed, Indeterminate };

std::string to_string(DistributionClass c);

struct ClassifierConfig {
  double tau_c{1.0};
  double theta{0.003};
  std::uint64_t n_min{1000};

  /// Throws InvalidClassifier.
  void validate() const;
};

/// Exotic if tail_mass < theta / 10, HeavyTailed if tail_mass >= theta,
/// Indeterminate in between. Throws TooFewSamples below n_min.
DistributionClass classify(const ArrivalHistogram &h,
                           const ClassifierConfig &c);

struct Calibration {
  ClassifierConfig classifier;
  double transverse_tau_max{0.0};
  double longitudinal_tail{0.0};
};

/// Sets tau_c = 1.1 x the transverse empirical tau_max and checks that the
/// longitudinal reference keeps at least 5 theta of its mass beyond it.
/// Throws InsufficientSeparation.
Calibration calibrate(const WaveguideModel &m, const IntegratorConfig &cfg,
                      std::size_t n_cal, std::uint64_t seed, double theta,
                      std::uint64_t n_min = 1000, unsigned threads = 0);

ClassifierConfig calibrate_classifier(const WaveguideModel &m,
                                      const IntegratorConfig &cfg,
                                      std::size_t n_cal, std::uint64_t seed,
                                      double theta = 0.003,
                                      std::uint64_t n_min = 1000,
                                      unsigned threads = 0);

/// Two-sample Kolmogorov-Smirnov distance of sorted samples.
double ks_statistic(const std::vector<double> &a, const std::vector<double> &b);

/// One-sample distance of a sorted sample against a continuous CDF.
double ks_statistic(const std::vector<double> &a,
                    const std::function<double(double)> &cdf);

/// Asymptotic two-sample KS critical value at tail probability p (the
/// default matches a two-sided 3 sigma level).
double ks_critical(std::size_t n, std::size_t m, double p = 0.0027);

/// P(tau <= T) for the longitudinal arrival law: the initial z-marginal
/// pushed through tau(Z0) = sqrt((L / Z0)^2 - 1).
double longitudinal_tau_cdf(const WaveguideModel &m, double T);

/// KS distance between n initial z coordinates evolved to t_check by the
/// exact convective field and the dispersed marginal F0(z / sqrt(1+t^2)).
double equivariance_check(const WaveguideModel &m, double t_check,
                          std::size_t n, std::uint64_t seed,
                          const IntegratorConfig &cfg = {},
                          unsigned threads = 0);

/// eta = (1 + |n+x - n-x| / (n+x + n-x) - |n+z - n-z| / (n+z + n-z)) / 2.
/// Throws EmptyChannelPair.
double flash_eta(std::uint64_t n_px, std::uint64_t n_mx, std::uint64_t n_pz,
                 std::uint64_t n_mz);

} // namespace bohmfol::ensemble
