#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bohmfol/fields.hpp"
#include "bohmfol/trajectories.hpp"

// Self-checks exposed through the command line: each compares a simulated
// quantity with an independent closed form.
namespace bohmfol::checks {

struct CheckResult {
  std::string name;
  bool passed{false};
  double measured{0.0};
  double threshold{0.0};
  std::string detail;
};

struct CheckOptions {
  fields::WaveguideModel model{};
  trajectories::IntegratorConfig integrator{};
  std::uint64_t seed{1};
  std::size_t n{10000};
  unsigned threads{0};
  /// Scales the numeric spin flux; -1 deliberately breaks the current check.
  double spin_flux_sign{1.0};
};

inline constexpr double kCurrentRelTol = 1e-5;
inline constexpr double kVelocityTol = 1e-10;
inline constexpr double kKsTol = 0.02;
inline constexpr double kFdStep = 1e-4;

/// Finite-difference Pauli current vs the closed-form singlet current at 100
/// random configurations (worst relative error), plus the identity
/// current / density == weighted branch velocity.
std::vector<CheckResult> check_currents(const CheckOptions &o);

/// Evolved vs dispersed z-marginal at t = 2.
CheckResult check_equivariance(const CheckOptions &o);

/// Longitudinal arrival times vs the pushforward of the initial marginal.
CheckResult check_pushforward(const CheckOptions &o);

std::vector<std::string> suite_names();

/// Runs one suite by name ("currents", "equivariance", "pushforward").
std::vector<CheckResult> run_suite(const std::string &name,
                                   const CheckOptions &o);

} // namespace bohmfol::checks
