#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bohmfol/ensemble.hpp"
#include "bohmfol/spacetime.hpp"

// EPRB runs against a hidden flat foliation, the switch-point search that
// recovers the foliation normal, and the one-way signaling protocol.
namespace bohmfol::protocol {

using ensemble::ClassifierConfig;
using ensemble::DistributionClass;
using fields::SpinAxis;
using spacetime::Event4;
using spacetime::FoliationNormal;
using spacetime::SimultaneousPair;

/// Source, arms and detectors in the lab frame. Alice's magnet sits at
/// source + alice_dist * alice_dir, Bob's gate at source + bob_dist * bob_dir.
struct LabGeometry {
  Vec3 source_pos{};
  Vec3 alice_dir{1.0, 0.0, 0.0};
  Vec3 bob_dir{-1.0, 0.0, 0.0};
  double alice_dist{10.0};
  double bob_dist{10.0};
  double particle_speed{0.5};
  double magnet_offset{0.0}; ///< extra time spent crossing Alice's magnet
  std::string orientation_id{"x"};
  bool calibrated{false}; ///< set by calibrate_signaling only

  /// Throws InvalidGeometry unless distances and speed are in range, the
  /// directions are unit vectors and A, B are spacelike separated for every
  /// bob_dist in [d_min, d_max].
  void validate(double d_min, double d_max) const;

  [[nodiscard]] LabGeometry with_bob_dist(double d) const;
  /// Alice's measurement event for a pair emitted at `emission`.
  [[nodiscard]] Event4 event_A(double emission) const;
  /// Release of particle 2 into Bob's waveguide.
  [[nodiscard]] Event4 event_B(double emission) const;
};

/// Time between successive pair emissions within a run.
inline constexpr double kPairSpacing = 1e-6;
/// Runs whose events are closer than this on the hidden foliation are
/// rejected as simultaneous.
inline constexpr double kScenarioTolerance = 1e-9;

/// Event at (mean(times), pos). Throws EmptyList.
Event4 aggregate_events(const std::vector<double> &times, const Vec3 &pos);

/// Ground-truth foliation. Only the simulated experiment reads it; the
/// accessor is virtual so tests can audit every read.
class HiddenFoliation {
public:
  explicit HiddenFoliation(const FoliationNormal &n) : n_(n) {}
  virtual ~HiddenFoliation() = default;

  [[nodiscard]] virtual const FoliationNormal &normal() const { return n_; }

private:
  FoliationNormal n_;
};

struct RunRecord {
  Event4 event_A;
  Event4 event_B;
  SpinAxis alice_axis{SpinAxis::X()};
  DistributionClass observed{DistributionClass::Indeterminate};
  std::uint64_t n_pairs{0};
  double bob_dist{0.0};
  double tail_mass{0.0};
};

/// Physics and numerics shared by every run of a simulated experiment.
struct RunSettings {
  fields::WaveguideModel model{};
  trajectories::IntegratorConfig integrator{};
  ClassifierConfig classifier{};
  double scenario_tolerance{kScenarioTolerance};
  unsigned threads{0};
};

/// One EPRB run of n_pairs: builds A and B, lets the hidden foliation pick
/// the scenario, simulates Bob's arrival times and classifies them. Throws
/// SimultaneousAmbiguous when the order is undecided within tolerance.
RunRecord simulate_run(const LabGeometry &g, const HiddenFoliation &hf,
                       const SpinAxis &axis, std::uint64_t n_pairs,
                       std::uint64_t seed, const RunSettings &settings);

/// What the experimenters can do: perform a run and look at the outcome.
class ExperimentOracle {
public:
  virtual ~ExperimentOracle() = default;
  virtual RunRecord run(const LabGeometry &g, const SpinAxis &axis,
                        std::uint64_t n_pairs, std::uint64_t seed) = 0;
};

class SimulatedExperiment final : public ExperimentOracle {
public:
  SimulatedExperiment(const HiddenFoliation &hf, RunSettings settings)
      : hf_(hf), settings_(std::move(settings)) {}

  RunRecord run(const LabGeometry &g, const SpinAxis &axis,
                std::uint64_t n_pairs, std::uint64_t seed) override {
    ++runs_;
    return simulate_run(g, hf_, axis, n_pairs, seed, settings_);
  }

  [[nodiscard]] std::uint64_t runs() const { return runs_; }

private:
  const HiddenFoliation &hf_;
  RunSettings settings_;
  std::uint64_t runs_{0};
};

struct SearchConfig {
  double d_min{4.0};
  double d_max{28.0};
  double d_tol{1e-3};
  std::uint64_t n_pairs{1000};
  std::uint64_t seed{1};
  int max_simultaneous_retries{3};
};

struct SwitchResult {
  SimultaneousPair pair;
  int iterations{0}; ///< bisection runs (bracket checks and the final
                     ///< recording run excluded)
  double bob_dist{0.0};
  std::vector<RunRecord> runs;
};

/// Bisection on bob_dist between d_min and d_max for the class flip with
/// Alice's axis fixed to x. Exotic moves Bob closer, HeavyTailed farther.
/// Throws NoBracket, IndeterminateRun (after one 4x escalation) and
/// SimultaneousAmbiguous (after the configured perturbation retries).
SwitchResult switch_search(ExperimentOracle &lab, const LabGeometry &g,
                           const SearchConfig &cfg);

SwitchResult switch_search(const LabGeometry &g, const HiddenFoliation &hf,
                           const SearchConfig &cfg,
                           const RunSettings &settings);

struct FoliationReport {
  std::array<SimultaneousPair, 3> pairs;
  FoliationNormal recovered;
  std::array<int, 3> iterations_per_orientation{};
  /// Guaranteed bound on the angle to the true normal from the search
  /// resolution alone.
  double error_bound{0.0};
  std::array<double, 3> singular_values{};
  /// Filled by attach_diagnostics; never computed on the inference path.
  std::optional<double> angular_error_vs_truth;
};

/// Three orthogonal-arm orientations (arms along x, y and z).
std::array<LabGeometry, 3> default_orientations(const LabGeometry &base);

/// Runs a switch search per orientation and solves for the normal.
FoliationReport detect_foliation(ExperimentOracle &lab,
                                 const std::array<LabGeometry, 3> &orientations,
                                 const SearchConfig &cfg);

/// Angle between the recovered normal and the truth.
void attach_diagnostics(FoliationReport &report, const HiddenFoliation &hf);

/// detect_foliation against a simulated experiment, with diagnostics.
FoliationReport detect_foliation(const HiddenFoliation &hf,
                                 const std::array<LabGeometry, 3> &orientations,
                                 const SearchConfig &cfg,
                                 const RunSettings &settings);

/// Angle bound for a recovered normal given per-pair placement error
/// `d_err` along Bob's arm.
double recovery_error_bound(const std::array<double, 3> &singular_values,
                            double d_err, double particle_speed);

struct SignalingCalibration {
  LabGeometry geometry;
  int adjustments{0};
  int runs{0};
};

/// Consecutive Exotic x-axis runs required to lock the order.
inline constexpr int kLockRuns = 5;

/// Moves Bob outward in steps of (d_max - d_min) / 16 until kLockRuns
/// consecutive x-axis runs are Exotic. Throws CannotEstablishOrder.
SignalingCalibration calibrate_signaling(ExperimentOracle &lab,
                                         const LabGeometry &g,
                                         const SearchConfig &cfg);

struct SignalReport {
  std::vector<int> sent_bits;
  std::vector<int> decoded_bits; ///< -1 marks an erasure
  std::vector<std::size_t> erasures;
  double bit_error_rate{0.0};
};

/// Bit 0: Alice measures along z; bit 1: along x. Bob decodes HeavyTailed as
/// 0, Exotic as 1 and Indeterminate as an erasure. Throws NotCalibrated.
SignalReport transmit_bits(ExperimentOracle &lab, const LabGeometry &g,
                           const std::vector<int> &bits,
                           std::uint64_t n_pairs_per_bit, std::uint64_t seed);

} // namespace bohmfol::protocol
