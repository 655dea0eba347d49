#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "bohmfol/ensemble.hpp"
#include "bohmfol/protocol.hpp"

namespace bohmfol::config {

struct EnsembleSection {
  std::uint64_t n{10000};
  std::uint64_t seed{1};
  std::uint64_t bins{200};
};

struct ClassifierSection {
  double theta{0.003};
  std::uint64_t n_min{1000};
  std::uint64_t n_cal{10000}; ///< calibration ensemble size
  std::optional<double> tau_c; ///< skip calibration when given
};

struct ProtocolSection {
  double d_min{4.0};
  double d_max{28.0};
  double d_tol{1e-3};
  double particle_speed{0.5};
  std::array<double, 3> hidden_boost{0.0, 0.0, 0.0};
  double alice_dist{10.0};
  double bob_dist{16.0}; ///< epr runs and the signaling starting point
  std::uint64_t n_pairs{1000};
};

/// Fully resolved configuration of one invocation.
struct RunConfig {
  fields::WaveguideModel model{};
  trajectories::IntegratorConfig integrator{};
  EnsembleSection ensemble{};
  ClassifierSection classifier{};
  ProtocolSection protocol{};

  /// Re-checks every numeric constraint; throws the module's own error
  /// (e.g. InvalidModel, BetaOutOfRange) or ConfigError.
  void validate() const;
};

/// Strict reader: unknown keys and wrong types raise ConfigError naming the
/// offending field path (e.g. "model.omega"). Missing keys keep defaults. A
/// report envelope is accepted too; its config_echo is used.
RunConfig from_json(const nlohmann::json &j);
RunConfig load_file(const std::string &path);

nlohmann::json to_json(const RunConfig &c);

} // namespace bohmfol::config
