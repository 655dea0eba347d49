#include "bohmfol/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "bohmfol/parallel.hpp"

namespace bohmfol::ensemble {

namespace {

// Gamma(3, kGammaScale) envelope for the z^2 exp(-z^2) marginal. With this
// scale the acceptance probability reduces to exp(-(z - 1/(2 scale))^2).
const double kGammaScale = 1.0 / std::sqrt(6.0);

double sample_half_oscillator_z(rng::Stream &rng) {
  const double peak = 0.5 / kGammaScale;
  for (;;) {
    const double z =
        -kGammaScale * std::log(rng.uniform() * rng.uniform() * rng.uniform());
    const double d = z - peak;
    if (rng.uniform() < std::exp(-d * d)) {
      return z;
    }
  }
}

struct TrajectoryResult {
  std::optional<double> tau;
  double min_vz{0.0};
  double rho_drift{0.0};
  bool wall_hit{false};
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

Vec3 sample_initial(const WaveguideModel &m, rng::Stream &rng) {
  double z = 0.0;
  if (m.z_mode == fields::ZMode::HalfOscillator) {
    z = sample_half_oscillator_z(rng);
  } else {
    // density (2/sqrt(pi)) exp(-z^2) on z > 0 has CDF erf(z)
    z = boost::math::erf_inv(rng.uniform());
  }
  const double sd = 1.0 / std::sqrt(2.0 * m.omega);
  const double x = rng.normal(0.0, sd);
  const double y = rng.normal(0.0, sd);
  return {x, y, z};
}

SpinOutcome sg_outcome(rng::Stream &rng) {
  return rng.coin() ? SpinOutcome::Up : SpinOutcome::Down;
}

std::string to_string(const EnsembleScenario &s) {
  if (s.order == EnsembleScenario::Order::BobFirst) {
    return "bob-first";
  }
  std::string out = "alice-first(" + fields::axis_label(s.axis);
  if (s.fixed_outcome) {
    out += *s.fixed_outcome == SpinOutcome::Up ? ",+" : ",-";
  }
  return out + ")";
}

std::vector<double> ArrivalHistogram::sorted_taus() const {
  std::vector<double> out = raw_taus;
  std::sort(out.begin(), out.end());
  return out;
}

double ArrivalHistogram::backflow_fraction() const {
  return n_total == 0 ? 0.0
                      : static_cast<double>(n_backflow) /
                            static_cast<double>(n_total);
}

void write_csv(std::ostream &os, const ArrivalHistogram &h) {
  os << "tau_lo,tau_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    os << format_double(h.bin_edges[i]) << ',' << format_double(h.bin_edges[i + 1])
       << ',' << h.counts[i] << '\n';
  }
  os << "no_arrival,," << h.n_no_arrival << '\n';
}

ArrivalHistogram arrival_distribution(const WaveguideModel &m,
                                      const EnsembleScenario &scenario,
                                      std::size_t n, std::uint64_t seed,
                                      const IntegratorConfig &cfg,
                                      const BinSpec &bins, unsigned threads) {
  if (n == 0) {
    throw EmptyEnsemble("ensemble size must be at least 1");
  }
  m.validate();
  cfg.validate();
  if (bins.count == 0) {
    throw EmptyEnsemble("histogram needs at least one bin");
  }

  std::vector<TrajectoryResult> results(n);
  parallel_for(n, threads, [&](std::size_t i) {
    rng::Stream rng(seed, i);
    const Vec3 x0 = sample_initial(m, rng);
    trajectories::ArrivalRecord rec;
    try {
      if (scenario.order == EnsembleScenario::Order::AliceFirst) {
        const SpinOutcome s =
            scenario.fixed_outcome ? *scenario.fixed_outcome : sg_outcome(rng);
        const auto field = [&](const Vec3 &x, double t) {
          return fields::conditional_velocity(m, scenario.axis, s, x, t);
        };
        rec = trajectories::integrate_until_crossing(field, x0, cfg, m.L);
      } else {
        const auto field = [&](const Vec3 &x, double t) {
          return fields::convective_velocity(m, x, t);
        };
        rec = trajectories::integrate_until_crossing(field, x0, cfg, m.L);
      }
    } catch (const Error &e) {
      throw TrajectoryFailure("trajectory " + std::to_string(i) + ": " +
                              e.what());
    }
    TrajectoryResult &r = results[i];
    if (rec.arrival) {
      r.tau = rec.arrival->tau;
    }
    r.min_vz = rec.min_vz;
    r.rho_drift = rec.rho_drift;
    r.wall_hit = rec.wall_guard_hit;
  });

  ArrivalHistogram h;
  const double hi = bins.hi > 0.0 ? bins.hi : cfg.t_max;
  const double width = hi / static_cast<double>(bins.count);
  h.bin_edges.reserve(bins.count + 2);
  for (std::size_t i = 0; i < bins.count; ++i) {
    h.bin_edges.push_back(width * static_cast<double>(i));
  }
  h.bin_edges.push_back(hi);
  if (hi < cfg.t_max) {
    h.bin_edges.push_back(cfg.t_max);
  }
  h.counts.assign(h.bin_edges.size() - 1, 0);
  h.n_total = n;
  h.raw_taus.reserve(n);

  for (const TrajectoryResult &r : results) {
    if (r.tau) {
      const double tau = *r.tau;
      h.raw_taus.push_back(tau);
      std::size_t idx = h.counts.size() - 1;
      if (tau < hi) {
        idx = std::min(bins.count - 1, static_cast<std::size_t>(tau / width));
      }
      ++h.counts[idx];
    } else {
      ++h.n_no_arrival;
    }
    if (r.min_vz < 0.0) {
      ++h.n_backflow;
    }
    if (r.wall_hit) {
      ++h.n_wall_guard;
    }
    h.max_rho_drift = std::max(h.max_rho_drift, r.rho_drift);
  }
  return h;
}

double empirical_tau_max(const ArrivalHistogram &h) {
  if (h.raw_taus.empty()) {
    throw NoArrivals("no trajectory reached the detector");
  }
  return *std::max_element(h.raw_taus.begin(), h.raw_taus.end());
}

double tail_mass(const ArrivalHistogram &h, double tau_c) {
  if (h.n_total == 0) {
    throw EmptyEnsemble("tail mass of an empty ensemble");
  }
  const auto late = std::count_if(h.raw_taus.begin(), h.raw_taus.end(),
                                  [&](double t) { return t > tau_c; });
  return static_cast<double>(static_cast<std::uint64_t>(late) +
                             h.n_no_arrival) /
         static_cast<double>(h.n_total);
}

std::string to_string(DistributionClass c) {
  switch (c) {
  case DistributionClass::Exotic:
    return "exotic";
  case DistributionClass::HeavyTailed:
    return "heavy-tailed";
  case DistributionClass::Indeterminate:
    return "indeterminate";
  }
  return "unknown";
}

void ClassifierConfig::validate() const {
  if (!(tau_c > 0.0) || !std::isfinite(tau_c)) {
    throw InvalidClassifier("tau_c must be positive and finite");
  }
  if (!(theta > 0.0 && theta < 1.0)) {
    throw InvalidClassifier("theta must lie in (0, 1)");
  }
}

DistributionClass classify(const ArrivalHistogram &h,
                           const ClassifierConfig &c) {
  c.validate();
  if (h.n_total < c.n_min) {
    throw TooFewSamples("ensemble of " + std::to_string(h.n_total) +
                        " is below n_min = " + std::to_string(c.n_min));
  }
  const double tail = tail_mass(h, c.tau_c);
  if (tail < c.theta / 10.0) {
    return DistributionClass::Exotic;
  }
  if (tail >= c.theta) {
    return DistributionClass::HeavyTailed;
  }
  return DistributionClass::Indeterminate;
}

Calibration calibrate(const WaveguideModel &m, const IntegratorConfig &cfg,
                      std::size_t n_cal, std::uint64_t seed, double theta,
                      std::uint64_t n_min, unsigned threads) {
  if (n_cal < 1000) {
    throw TooFewSamples("calibration needs at least 1000 trajectories");
  }
  const ArrivalHistogram transverse = arrival_distribution(
      m, EnsembleScenario::alice_first(SpinAxis::X()), n_cal,
      rng::derive_seed(seed, 1), cfg, {}, threads);
  const ArrivalHistogram longitudinal = arrival_distribution(
      m, EnsembleScenario::alice_first(SpinAxis::Z()), n_cal,
      rng::derive_seed(seed, 2), cfg, {}, threads);

  Calibration cal;
  cal.transverse_tau_max = empirical_tau_max(transverse);
  cal.classifier.tau_c = 1.1 * cal.transverse_tau_max;
  cal.classifier.theta = theta;
  cal.classifier.n_min = n_min;
  cal.classifier.validate();
  cal.longitudinal_tail = tail_mass(longitudinal, cal.classifier.tau_c);
  if (cal.longitudinal_tail < 5.0 * theta) {
    throw InsufficientSeparation(
        "longitudinal tail mass " + format_double(cal.longitudinal_tail) +
        " beyond tau_c = " + format_double(cal.classifier.tau_c) +
        " is below 5 theta = " + format_double(5.0 * theta));
  }
  return cal;
}

ClassifierConfig calibrate_classifier(const WaveguideModel &m,
                                      const IntegratorConfig &cfg,
                                      std::size_t n_cal, std::uint64_t seed,
                                      double theta, std::uint64_t n_min,
                                      unsigned threads) {
  return calibrate(m, cfg, n_cal, seed, theta, n_min, threads).classifier;
}

double ks_statistic(const std::vector<double> &a,
                    const std::vector<double> &b) {
  if (a.empty() || b.empty()) {
    throw EmptySample("KS statistic needs two non-empty samples");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) {
      ++i;
    }
    while (j < b.size() && b[j] <= v) {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double ks_statistic(const std::vector<double> &a,
                    const std::function<double(double)> &cdf) {
  if (a.empty()) {
    throw EmptySample("KS statistic needs a non-empty sample");
  }
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f,
                  f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical(std::size_t n, std::size_t m, double p) {
  const double c = std::sqrt(-0.5 * std::log(0.5 * p));
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return c * std::sqrt((dn + dm) / (dn * dm));
}

double longitudinal_tau_cdf(const WaveguideModel &m, double T) {
  if (T < 0.0) {
    return 0.0;
  }
  return 1.0 - fields::initial_z_cdf(m, m.L / std::sqrt(1.0 + T * T));
}

double equivariance_check(const WaveguideModel &m, double t_check,
                          std::size_t n, std::uint64_t seed,
                          const IntegratorConfig &cfg, unsigned threads) {
  if (n == 0) {
    throw EmptyEnsemble("equivariance check needs at least one sample");
  }
  if (t_check < 0.0) {
    throw DomainError("t_check must be non-negative");
  }
  // The dispersed marginal is the exact-DND law; the check always uses that
  // convective field.
  WaveguideModel exact = m;
  exact.conv_mode = fields::ConvectionMode::ExactDND;
  std::vector<double> z(n);
  parallel_for(n, threads, [&](std::size_t i) {
    rng::Stream rng(seed, i);
    const Vec3 x0 = sample_initial(exact, rng);
    const auto field = [&](const Vec3 &x, double t) {
      return fields::convective_velocity(exact, x, t);
    };
    z[i] = trajectories::evolve(field, x0, cfg, t_check).z;
  });
  std::sort(z.begin(), z.end());
  const double width = std::sqrt(1.0 + t_check * t_check);
  return ks_statistic(z, [&](double v) {
    return fields::initial_z_cdf(exact, v / width);
  });
}

double flash_eta(std::uint64_t n_px, std::uint64_t n_mx, std::uint64_t n_pz,
                 std::uint64_t n_mz) {
  if (n_px + n_mx == 0 || n_pz + n_mz == 0) {
    throw EmptyChannelPair("each channel pair needs at least one count");
  }
  const auto contrast = [](std::uint64_t a, std::uint64_t b) {
    const double da = static_cast<double>(a);
    const double db = static_cast<double>(b);
    return std::abs(da - db) / (da + db);
  };
  return 0.5 * (1.0 + contrast(n_px, n_mx) - contrast(n_pz, n_mz));
}

} // namespace bohmfol::ensemble
