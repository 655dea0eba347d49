#include "bohmfol/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace bohmfol::config {

using nlohmann::json;

namespace {

void reject_unknown(const json &obj, const std::string &path,
                    const std::set<std::string> &allowed) {
  if (!obj.is_object()) {
    throw ConfigError((path.empty() ? "config" : path) +
                      ": expected an object");
  }
  for (const auto &item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError((path.empty() ? "" : path + ".") + item.key() +
                        ": unknown key");
    }
  }
}

std::string join(const std::string &path, const std::string &key) {
  return path.empty() ? key : path + "." + key;
}

void read(const json &obj, const std::string &path, const char *key,
          double &out) {
  if (!obj.contains(key)) {
    return;
  }
  const json &v = obj.at(key);
  if (!v.is_number()) {
    throw ConfigError(join(path, key) + ": expected a number");
  }
  out = v.get<double>();
}

void read(const json &obj, const std::string &path, const char *key,
          std::uint64_t &out) {
  if (!obj.contains(key)) {
    return;
  }
  const json &v = obj.at(key);
  if (!v.is_number_unsigned() &&
      !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError(join(path, key) + ": expected a non-negative integer");
  }
  out = v.get<std::uint64_t>();
}

template <class Parse, class T>
void read_enum(const json &obj, const std::string &path, const char *key,
               Parse parse, T &out) {
  if (!obj.contains(key)) {
    return;
  }
  const json &v = obj.at(key);
  if (!v.is_string()) {
    throw ConfigError(join(path, key) + ": expected a string");
  }
  try {
    out = parse(v.get<std::string>());
  } catch (const Error &e) {
    throw ConfigError(join(path, key) + ": " + e.what());
  }
}

} // namespace

void RunConfig::validate() const {
  model.validate();
  integrator.validate();
  if (ensemble.n == 0) {
    throw ConfigError("ensemble.n: must be at least 1");
  }
  if (ensemble.bins == 0) {
    throw ConfigError("ensemble.bins: must be at least 1");
  }
  if (!(classifier.theta > 0.0 && classifier.theta < 1.0)) {
    throw ConfigError("classifier.theta: must lie in (0, 1)");
  }
  if (classifier.tau_c && !(*classifier.tau_c > 0.0)) {
    throw ConfigError("classifier.tau_c: must be positive");
  }
  if (!classifier.tau_c && classifier.n_cal < 1000) {
    throw ConfigError("classifier.n_cal: must be at least 1000");
  }
  const ProtocolSection &p = protocol;
  if (!(p.d_min > 0.0) || !(p.d_max > p.d_min)) {
    throw ConfigError("protocol.d_min/d_max: need 0 < d_min < d_max");
  }
  if (!(p.d_tol > 0.0)) {
    throw ConfigError("protocol.d_tol: must be positive");
  }
  if (!(p.particle_speed > 0.0 && p.particle_speed < 1.0)) {
    throw ConfigError("protocol.particle_speed: must lie in (0, 1)");
  }
  if (!(p.alice_dist > 0.0) || !(p.bob_dist > 0.0)) {
    throw ConfigError("protocol.alice_dist/bob_dist: must be positive");
  }
  if (p.n_pairs == 0) {
    throw ConfigError("protocol.n_pairs: must be at least 1");
  }
  // BetaOutOfRange carries its own exit status.
  spacetime::BoostSpec(
      Vec3{p.hidden_boost[0], p.hidden_boost[1], p.hidden_boost[2]});
}

RunConfig from_json(const json &input) {
  const json &j =
      input.is_object() && input.contains("config_echo") &&
              input.contains("command")
          ? input.at("config_echo")
          : input;
  reject_unknown(j, "", {"model", "integrator", "ensemble", "classifier",
                         "protocol"});
  RunConfig c;
  if (j.contains("model")) {
    const json &m = j.at("model");
    reject_unknown(m, "model", {"omega", "L", "z_mode", "conv_mode", "k2"});
    read(m, "model", "omega", c.model.omega);
    read(m, "model", "L", c.model.L);
    read(m, "model", "k2", c.model.k2);
    read_enum(m, "model", "z_mode", fields::parse_z_mode, c.model.z_mode);
    read_enum(m, "model", "conv_mode", fields::parse_conv_mode,
              c.model.conv_mode);
  }
  if (j.contains("integrator")) {
    const json &s = j.at("integrator");
    reject_unknown(s, "integrator", {"dt", "t_max", "crossing_tol"});
    read(s, "integrator", "dt", c.integrator.dt);
    read(s, "integrator", "t_max", c.integrator.t_max);
    read(s, "integrator", "crossing_tol", c.integrator.crossing_tol);
  }
  if (j.contains("ensemble")) {
    const json &s = j.at("ensemble");
    reject_unknown(s, "ensemble", {"n", "seed", "bins"});
    read(s, "ensemble", "n", c.ensemble.n);
    read(s, "ensemble", "seed", c.ensemble.seed);
    read(s, "ensemble", "bins", c.ensemble.bins);
  }
  if (j.contains("classifier")) {
    const json &s = j.at("classifier");
    reject_unknown(s, "classifier", {"theta", "n_min", "n_cal", "tau_c"});
    read(s, "classifier", "theta", c.classifier.theta);
    read(s, "classifier", "n_min", c.classifier.n_min);
    read(s, "classifier", "n_cal", c.classifier.n_cal);
    if (s.contains("tau_c") && !s.at("tau_c").is_null()) {
      double tau_c = 0.0;
      read(s, "classifier", "tau_c", tau_c);
      c.classifier.tau_c = tau_c;
    }
  }
  if (j.contains("protocol")) {
    const json &s = j.at("protocol");
    reject_unknown(s, "protocol",
                   {"d_min", "d_max", "d_tol", "particle_speed",
                    "hidden_boost", "alice_dist", "bob_dist", "n_pairs"});
    read(s, "protocol", "d_min", c.protocol.d_min);
    read(s, "protocol", "d_max", c.protocol.d_max);
    read(s, "protocol", "d_tol", c.protocol.d_tol);
    read(s, "protocol", "particle_speed", c.protocol.particle_speed);
    read(s, "protocol", "alice_dist", c.protocol.alice_dist);
    read(s, "protocol", "bob_dist", c.protocol.bob_dist);
    read(s, "protocol", "n_pairs", c.protocol.n_pairs);
    if (s.contains("hidden_boost")) {
      const json &b = s.at("hidden_boost");
      if (!b.is_array() || b.size() != 3) {
        throw ConfigError("protocol.hidden_boost: expected [bx, by, bz]");
      }
      for (std::size_t i = 0; i < 3; ++i) {
        if (!b[i].is_number()) {
          throw ConfigError("protocol.hidden_boost[" + std::to_string(i) +
                            "]: expected a number");
        }
        c.protocol.hidden_boost[i] = b[i].get<double>();
      }
    }
  }
  return c;
}

RunConfig load_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error &e) {
    throw ConfigError(path + ": " + e.what());
  }
  try {
    return from_json(j);
  } catch (const ConfigError &e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json to_json(const RunConfig &c) {
  json j;
  j["model"] = {{"omega", c.model.omega},
                {"L", c.model.L},
                {"z_mode", fields::to_string(c.model.z_mode)},
                {"conv_mode", fields::to_string(c.model.conv_mode)},
                {"k2", c.model.k2}};
  j["integrator"] = {{"dt", c.integrator.dt},
                     {"t_max", c.integrator.t_max},
                     {"crossing_tol", c.integrator.crossing_tol}};
  j["ensemble"] = {{"n", c.ensemble.n},
                   {"seed", c.ensemble.seed},
                   {"bins", c.ensemble.bins}};
  j["classifier"] = {{"theta", c.classifier.theta},
                     {"n_min", c.classifier.n_min},
                     {"n_cal", c.classifier.n_cal},
                     {"tau_c", c.classifier.tau_c
                                   ? json(*c.classifier.tau_c)
                                   : json(nullptr)}};
  j["protocol"] = {{"d_min", c.protocol.d_min},
                   {"d_max", c.protocol.d_max},
                   {"d_tol", c.protocol.d_tol},
                   {"particle_speed", c.protocol.particle_speed},
                   {"hidden_boost", c.protocol.hidden_boost},
                   {"alice_dist", c.protocol.alice_dist},
                   {"bob_dist", c.protocol.bob_dist},
                   {"n_pairs", c.protocol.n_pairs}};
  return j;
}

} // namespace bohmfol::config
