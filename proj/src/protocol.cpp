#include "bohmfol/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace bohmfol::protocol {

namespace {

constexpr double kUnitTolerance = 1e-12;
constexpr int kSpacelikeGrid = 1024;
constexpr double kCoplanarTolerance = 1e-6;

bool unit(const Vec3 &v) {
  return v.finite() && std::abs(v.norm() - 1.0) <= kUnitTolerance;
}

std::string describe(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

} // namespace

void LabGeometry::validate(double d_min, double d_max) const {
  if (!source_pos.finite()) {
    throw InvalidGeometry("source position must be finite");
  }
  if (!unit(alice_dir) || !unit(bob_dir)) {
    throw InvalidGeometry("arm directions must be unit vectors");
  }
  if (!(alice_dist > 0.0) || !(bob_dist > 0.0)) {
    throw InvalidGeometry("arm distances must be positive");
  }
  if (!(particle_speed > 0.0 && particle_speed < 1.0)) {
    throw InvalidGeometry("particle speed must lie in (0, 1)");
  }
  if (!(magnet_offset >= 0.0) || !std::isfinite(magnet_offset)) {
    throw InvalidGeometry("magnet offset must be non-negative");
  }
  if (!(d_min > 0.0) || !(d_max > d_min)) {
    throw InvalidGeometry("search range must satisfy 0 < d_min < d_max");
  }
  for (int k = 0; k <= kSpacelikeGrid; ++k) {
    const double d = d_min + (d_max - d_min) * k / kSpacelikeGrid;
    const Event4 s = event_A(0.0) - with_bob_dist(d).event_B(0.0);
    if (!(spacetime::minkowski_dot(s, s) < 0.0)) {
      throw InvalidGeometry("events A and B are not spacelike separated at "
                            "bob_dist = " +
                            describe(d));
    }
  }
}

LabGeometry LabGeometry::with_bob_dist(double d) const {
  LabGeometry g = *this;
  g.bob_dist = d;
  return g;
}

Event4 LabGeometry::event_A(double emission) const {
  return {emission + alice_dist / particle_speed + magnet_offset,
          source_pos + alice_dist * alice_dir};
}

Event4 LabGeometry::event_B(double emission) const {
  return {emission + bob_dist / particle_speed,
          source_pos + bob_dist * bob_dir};
}

Event4 aggregate_events(const std::vector<double> &times, const Vec3 &pos) {
  if (times.empty()) {
    throw EmptyList("cannot aggregate an empty list of event times");
  }
  const double sum = std::accumulate(times.begin(), times.end(), 0.0);
  return {sum / static_cast<double>(times.size()), pos};
}

RunRecord simulate_run(const LabGeometry &g, const HiddenFoliation &hf,
                       const SpinAxis &axis, std::uint64_t n_pairs,
                       std::uint64_t seed, const RunSettings &settings) {
  if (n_pairs == 0) {
    throw EmptyList("a run needs at least one pair");
  }
  std::vector<double> times_A(n_pairs);
  std::vector<double> times_B(n_pairs);
  for (std::uint64_t i = 0; i < n_pairs; ++i) {
    const double emission = kPairSpacing * static_cast<double>(i);
    times_A[i] = g.event_A(emission).t;
    times_B[i] = g.event_B(emission).t;
  }
  RunRecord rec;
  rec.event_A = aggregate_events(times_A, g.event_A(0.0).spatial());
  rec.event_B = aggregate_events(times_B, g.event_B(0.0).spatial());
  rec.alice_axis = axis;
  rec.n_pairs = n_pairs;
  rec.bob_dist = g.bob_dist;

  // Every pair shares the same A-B separation, so one order holds for the
  // whole run.
  const FoliationNormal &n = hf.normal();
  const double dt = spacetime::foliation_time(n, rec.event_A) -
                    spacetime::foliation_time(n, rec.event_B);
  if (std::abs(dt) <= settings.scenario_tolerance) {
    throw SimultaneousAmbiguous("events A and B are simultaneous within "
                                "tolerance at bob_dist = " +
                                describe(g.bob_dist));
  }
  const auto scenario = dt < 0.0
                            ? ensemble::EnsembleScenario::alice_first(axis)
                            : ensemble::EnsembleScenario::bob_first();

  const ensemble::BinSpec bins{200, 1.5 * settings.classifier.tau_c};
  const ensemble::ArrivalHistogram h = ensemble::arrival_distribution(
      settings.model, scenario, n_pairs, seed, settings.integrator, bins,
      settings.threads);
  rec.tail_mass = ensemble::tail_mass(h, settings.classifier.tau_c);
  rec.observed = ensemble::classify(h, settings.classifier);
  return rec;
}

namespace {

// One classified run at distance d, handling the two recoverable failures.
class Runner {
public:
  Runner(ExperimentOracle &lab, const SearchConfig &cfg, SwitchResult &out)
      : lab_(lab), cfg_(cfg), out_(out) {}

  RunRecord observe(const LabGeometry &g, double d) {
    double at = d;
    for (int attempt = 0;; ++attempt) {
      try {
        RunRecord rec = once(g.with_bob_dist(at), cfg_.n_pairs);
        if (rec.observed == DistributionClass::Indeterminate) {
          rec = once(g.with_bob_dist(at), 4 * cfg_.n_pairs);
          if (rec.observed == DistributionClass::Indeterminate) {
            throw IndeterminateRun("run at bob_dist = " + describe(at) +
                                   " stayed indeterminate after escalating "
                                   "to " +
                                   std::to_string(4 * cfg_.n_pairs) +
                                   " pairs");
          }
        }
        return rec;
      } catch (const SimultaneousAmbiguous &) {
        if (attempt >= cfg_.max_simultaneous_retries) {
          throw;
        }
        // Step off the leaf by a fraction of the resolution.
        at = d + 0.125 * cfg_.d_tol * (attempt + 1);
      }
    }
  }

private:
  RunRecord once(const LabGeometry &g, std::uint64_t n_pairs) {
    RunRecord rec = lab_.run(g, SpinAxis::X(), n_pairs,
                             rng::derive_seed(cfg_.seed, counter_++));
    out_.runs.push_back(rec);
    return rec;
  }

  ExperimentOracle &lab_;
  const SearchConfig &cfg_;
  SwitchResult &out_;
  std::uint64_t counter_{0};
};

// Re-raises the active protocol error with the orientation label prepended,
// keeping its type.
[[noreturn]] void rethrow_for_orientation(const std::string &label) {
  const std::string prefix = "orientation " + label + ": ";
  try {
    throw;
  } catch (const NoBracket &e) {
    throw NoBracket(prefix + e.what());
  } catch (const IndeterminateRun &e) {
    throw IndeterminateRun(prefix + e.what());
  } catch (const SimultaneousAmbiguous &e) {
    throw SimultaneousAmbiguous(prefix + e.what());
  } catch (const InvalidGeometry &e) {
    throw InvalidGeometry(prefix + e.what());
  } catch (const ProtocolError &e) {
    throw ProtocolError(prefix + e.what());
  }
}

} // namespace

SwitchResult switch_search(ExperimentOracle &lab, const LabGeometry &g,
                           const SearchConfig &cfg) {
  if (!(cfg.d_tol > 0.0)) {
    throw InvalidGeometry("d_tol must be positive");
  }
  g.validate(cfg.d_min, cfg.d_max);
  SwitchResult out;
  Runner runner(lab, cfg, out);

  double lo = cfg.d_min;
  double hi = cfg.d_max;
  const DistributionClass c_lo = runner.observe(g, lo).observed;
  const DistributionClass c_hi = runner.observe(g, hi).observed;
  if (c_lo == c_hi) {
    throw NoBracket("both ends of [" + describe(lo) + ", " + describe(hi) +
                    "] classify as " + ensemble::to_string(c_lo));
  }
  while (hi - lo > cfg.d_tol) {
    const double mid = 0.5 * (lo + hi);
    const DistributionClass c = runner.observe(g, mid).observed;
    ++out.iterations;
    // Exotic means Alice was first: Bob moves closer. HeavyTailed: farther.
    if (c == c_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // The recording run at the bracket centre is not part of the search.
  const double d_final = 0.5 * (lo + hi);
  const RunRecord last = runner.observe(g, d_final);
  out.bob_dist = last.bob_dist;
  out.pair = {last.event_A, last.event_B, g.orientation_id};
  return out;
}

SwitchResult switch_search(const LabGeometry &g, const HiddenFoliation &hf,
                           const SearchConfig &cfg,
                           const RunSettings &settings) {
  SimulatedExperiment lab(hf, settings);
  return switch_search(lab, g, cfg);
}

std::array<LabGeometry, 3> default_orientations(const LabGeometry &base) {
  const std::array<Vec3, 3> axes{Vec3{1.0, 0.0, 0.0}, Vec3{0.0, 1.0, 0.0},
                                 Vec3{0.0, 0.0, 1.0}};
  const std::array<const char *, 3> labels{"x", "y", "z"};
  std::array<LabGeometry, 3> out;
  for (std::size_t k = 0; k < 3; ++k) {
    out[k] = base;
    out[k].alice_dir = axes[k];
    out[k].bob_dir = -axes[k];
    out[k].orientation_id = labels[k];
    out[k].calibrated = false;
  }
  return out;
}

double recovery_error_bound(const std::array<double, 3> &singular_values,
                            double d_err, double particle_speed) {
  // Each true-normal residual n.(P_A - P_B) is at most d_err times the rate
  // of change of n.P_B along Bob's arm, n0 (1/v + |n_vec|/n0) <= n0 (1/v + 1).
  const double sigma = singular_values[2];
  if (!(sigma > 0.0)) {
    return std::acos(-1.0) / 2.0;
  }
  const double r = std::sqrt(3.0) * d_err * (1.0 / particle_speed + 1.0);
  return std::asin(std::min(1.0, r / sigma));
}

FoliationReport detect_foliation(ExperimentOracle &lab,
                                 const std::array<LabGeometry, 3> &orientations,
                                 const SearchConfig &cfg) {
  FoliationReport report;
  double slowest = 1.0;
  for (std::size_t k = 0; k < 3; ++k) {
    SearchConfig sub = cfg;
    sub.seed = rng::derive_seed(cfg.seed, 1000 + k);
    try {
      const SwitchResult r = switch_search(lab, orientations[k], sub);
      report.pairs[k] = r.pair;
      report.iterations_per_orientation[k] = r.iterations;
    } catch (const ProtocolError &) {
      rethrow_for_orientation(orientations[k].orientation_id);
    }
    slowest = std::min(slowest, orientations[k].particle_speed);
  }
  const Event4 s1 = report.pairs[0].separation();
  const Event4 s2 = report.pairs[1].separation();
  const Event4 s3 = report.pairs[2].separation();
  // Coplanar arms give separations that are exactly rank 2 at the true
  // switch points; bisection noise would otherwise hide that.
  const Vec3 a1 = s1.spatial(), a2 = s2.spatial(), a3 = s3.spatial();
  const double volume = std::abs(dot(a1, cross(a2, a3)));
  if (!(volume > kCoplanarTolerance * a1.norm() * a2.norm() * a3.norm()) ||
      !spacetime::check_triad_independence(s1, s2, s3)) {
    throw DegenerateTriad("the three orientations give linearly dependent "
                          "separations; rotate the setup out of a common "
                          "plane");
  }
  report.recovered = spacetime::solve_normal(s1, s2, s3);
  report.singular_values = spacetime::separation_singular_values(s1, s2, s3);
  // The final placement is within d_tol / 2 of the switch point, plus at
  // most 3/8 d_tol if a run had to step off an exactly simultaneous leaf.
  report.error_bound =
      recovery_error_bound(report.singular_values, cfg.d_tol, slowest);
  return report;
}

void attach_diagnostics(FoliationReport &report, const HiddenFoliation &hf) {
  report.angular_error_vs_truth = spacetime::component_angle(
      report.recovered.vector(), hf.normal().vector());
}

FoliationReport detect_foliation(const HiddenFoliation &hf,
                                 const std::array<LabGeometry, 3> &orientations,
                                 const SearchConfig &cfg,
                                 const RunSettings &settings) {
  SimulatedExperiment lab(hf, settings);
  FoliationReport report = detect_foliation(lab, orientations, cfg);
  attach_diagnostics(report, hf);
  return report;
}

SignalingCalibration calibrate_signaling(ExperimentOracle &lab,
                                         const LabGeometry &g,
                                         const SearchConfig &cfg) {
  g.validate(cfg.d_min, cfg.d_max);
  const double step = (cfg.d_max - cfg.d_min) / 16.0;
  SignalingCalibration cal;
  double d = g.bob_dist;
  int streak = 0;
  std::uint64_t counter = 0;
  while (d <= cfg.d_max) {
    DistributionClass c = DistributionClass::Indeterminate;
    try {
      c = lab.run(g.with_bob_dist(d), SpinAxis::X(), cfg.n_pairs,
                  rng::derive_seed(cfg.seed, counter++))
              .observed;
    } catch (const SimultaneousAmbiguous &) {
      // On the leaf through A: treat like a failed confirmation.
    }
    ++cal.runs;
    if (c == DistributionClass::Exotic) {
      if (++streak == kLockRuns) {
        cal.geometry = g.with_bob_dist(d);
        cal.geometry.calibrated = true;
        return cal;
      }
      continue;
    }
    streak = 0;
    d += step;
    ++cal.adjustments;
  }
  throw CannotEstablishOrder("no bob_dist up to d_max = " + describe(cfg.d_max) +
                             " gives Alice-first order");
}

SignalReport transmit_bits(ExperimentOracle &lab, const LabGeometry &g,
                           const std::vector<int> &bits,
                           std::uint64_t n_pairs_per_bit, std::uint64_t seed) {
  if (!g.calibrated) {
    throw NotCalibrated("geometry has not been locked by calibrate_signaling");
  }
  if (bits.empty()) {
    throw EmptyList("message has no bits");
  }
  SignalReport report;
  report.sent_bits = bits;
  std::size_t errors = 0;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k] != 0 && bits[k] != 1) {
      throw ProtocolError("bit " + std::to_string(k) + " is not 0 or 1");
    }
    const SpinAxis axis = bits[k] == 1 ? SpinAxis::X() : SpinAxis::Z();
    const RunRecord rec =
        lab.run(g, axis, n_pairs_per_bit, rng::derive_seed(seed, k));
    int decoded = -1;
    switch (rec.observed) {
    case DistributionClass::HeavyTailed:
      decoded = 0;
      break;
    case DistributionClass::Exotic:
      decoded = 1;
      break;
    case DistributionClass::Indeterminate:
      report.erasures.push_back(k);
      break;
    }
    report.decoded_bits.push_back(decoded);
    if (decoded >= 0 && decoded != bits[k]) {
      ++errors;
    }
  }
  const std::size_t delivered = bits.size() - report.erasures.size();
  report.bit_error_rate =
      delivered == 0 ? 1.0
                     : static_cast<double>(errors) /
                           static_cast<double>(delivered);
  return report;
}

} // namespace bohmfol::protocol
