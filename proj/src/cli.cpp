#include "bohmfol/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <optional>
#include <sstream>

#include "bohmfol/checks.hpp"
#include "bohmfol/config.hpp"
#include "bohmfol/ensemble.hpp"
#include "bohmfol/protocol.hpp"

namespace bohmfol::cli {

namespace {

using nlohmann::json;

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned threads{0};
  std::string out_path;
};

json event_json(const spacetime::Event4 &e) {
  return json::array({e.t, e.x, e.y, e.z});
}

json normal_json(const spacetime::FoliationNormal &n) {
  return event_json(n.vector());
}

std::array<double, 3> parse_triple(const std::string &text,
                                   const std::string &flag) {
  std::array<double, 3> v{};
  std::stringstream ss(text);
  std::string part;
  std::size_t i = 0;
  while (std::getline(ss, part, ',')) {
    if (i >= 3) {
      throw ConfigError(flag + ": expected three comma-separated numbers");
    }
    try {
      std::size_t used = 0;
      v[i] = std::stod(part, &used);
      if (used != part.size()) {
        throw std::invalid_argument(part);
      }
    } catch (const std::logic_error &) {
      throw ConfigError(flag + ": '" + part + "' is not a number");
    }
    ++i;
  }
  if (i != 3) {
    throw ConfigError(flag + ": expected three comma-separated numbers");
  }
  return v;
}

fields::SpinAxis parse_axis(const std::string &s) {
  if (s == "x") {
    return fields::SpinAxis::X();
  }
  if (s == "z") {
    return fields::SpinAxis::Z();
  }
  throw ConfigError("--axis: expected x or z");
}

std::vector<int> parse_bits(const std::string &s) {
  if (s.empty()) {
    throw ConfigError("--bits: the message is empty");
  }
  std::vector<int> bits;
  for (char c : s) {
    if (c != '0' && c != '1') {
      throw ConfigError("--bits: '" + std::string(1, c) +
                        "' is not a binary digit");
    }
    bits.push_back(c - '0');
  }
  return bits;
}

class Session {
public:
  Session(const GlobalOptions &g, std::ostream &out)
      : global_(g), out_(out) {
    if (!g.config_path.empty()) {
      cfg_ = config::load_file(g.config_path);
    }
    if (g.seed) {
      cfg_.ensemble.seed = *g.seed;
    }
  }

  config::RunConfig &cfg() { return cfg_; }
  unsigned threads() const { return global_.threads; }
  const std::string &out_path() const { return global_.out_path; }

  /// Classifier from the configured tau_c, or a fresh calibration.
  ensemble::ClassifierConfig classifier(json &results) {
    ensemble::ClassifierConfig c;
    c.theta = cfg_.classifier.theta;
    c.n_min = cfg_.classifier.n_min;
    if (cfg_.classifier.tau_c) {
      c.tau_c = *cfg_.classifier.tau_c;
      c.validate();
      results["calibration"] = {{"tau_c", c.tau_c}, {"source", "config"}};
      return c;
    }
    const auto cal = ensemble::calibrate(
        cfg_.model, cfg_.integrator, cfg_.classifier.n_cal,
        rng::derive_seed(cfg_.ensemble.seed, 0xca1b), c.theta, c.n_min,
        threads());
    results["calibration"] = {
        {"tau_c", cal.classifier.tau_c},
        {"transverse_tau_max", cal.transverse_tau_max},
        {"longitudinal_tail", cal.longitudinal_tail},
        {"source", "calibrated"}};
    return cal.classifier;
  }

  protocol::RunSettings settings(const ensemble::ClassifierConfig &c) const {
    protocol::RunSettings s;
    s.model = cfg_.model;
    s.integrator = cfg_.integrator;
    s.classifier = c;
    s.threads = global_.threads;
    return s;
  }

  protocol::SearchConfig search() const {
    protocol::SearchConfig s;
    s.d_min = cfg_.protocol.d_min;
    s.d_max = cfg_.protocol.d_max;
    s.d_tol = cfg_.protocol.d_tol;
    s.n_pairs = cfg_.protocol.n_pairs;
    s.seed = cfg_.ensemble.seed;
    return s;
  }

  protocol::LabGeometry base_geometry() const {
    protocol::LabGeometry g;
    g.alice_dist = cfg_.protocol.alice_dist;
    g.bob_dist = cfg_.protocol.bob_dist;
    g.particle_speed = cfg_.protocol.particle_speed;
    return g;
  }

  spacetime::FoliationNormal hidden_normal() const {
    const auto &b = cfg_.protocol.hidden_boost;
    return spacetime::FoliationNormal::from_boost(
        spacetime::BoostSpec(Vec3{b[0], b[1], b[2]}));
  }

  void emit(const std::string &command, json results) {
    json report;
    report["command"] = command;
    report["config_echo"] = config::to_json(cfg_);
    report["results"] = std::move(results);
    report["versions"] = kVersion;
    const std::string text = report.dump(2) + "\n";
    if (global_.out_path.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(global_.out_path, std::ios::binary);
    if (!f) {
      throw ConfigError("cannot write report to '" + global_.out_path + "'");
    }
    f << text;
  }

private:
  GlobalOptions global_;
  std::ostream &out_;
  config::RunConfig cfg_;
};

struct ArrivalArgs {
  std::string axis;
  std::string order{"alice-first"};
  std::string outcome{"random"};
  std::optional<std::uint64_t> n;
  std::string csv;
};

int cmd_arrival(Session &s, const ArrivalArgs &a) {
  if (a.n) {
    s.cfg().ensemble.n = *a.n;
  }
  s.cfg().validate();
  const fields::SpinAxis axis = parse_axis(a.axis);
  ensemble::EnsembleScenario scenario = ensemble::EnsembleScenario::bob_first();
  if (a.order == "alice-first") {
    scenario = ensemble::EnsembleScenario::alice_first(axis);
    if (a.outcome == "up") {
      scenario.fixed_outcome = fields::SpinOutcome::Up;
    } else if (a.outcome == "down") {
      scenario.fixed_outcome = fields::SpinOutcome::Down;
    }
  }
  json results;
  results["args"] = {{"axis", a.axis}, {"order", a.order},
                     {"outcome", a.outcome}};
  const ensemble::ClassifierConfig classifier = s.classifier(results);
  const auto &c = s.cfg();
  const ensemble::ArrivalHistogram h = ensemble::arrival_distribution(
      c.model, scenario, c.ensemble.n, c.ensemble.seed, c.integrator,
      {c.ensemble.bins, 1.5 * classifier.tau_c}, s.threads());

  results["scenario"] = ensemble::to_string(scenario);
  results["n_total"] = h.n_total;
  results["n_no_arrival"] = h.n_no_arrival;
  results["empirical_tau_max"] =
      h.raw_taus.empty() ? json(nullptr) : json(ensemble::empirical_tau_max(h));
  results["tail_mass"] = ensemble::tail_mass(h, classifier.tau_c);
  results["class"] = h.n_total >= classifier.n_min
                         ? json(ensemble::to_string(
                               ensemble::classify(h, classifier)))
                         : json(nullptr);
  results["backflow_fraction"] = h.backflow_fraction();
  results["wall_guard_hits"] = h.n_wall_guard;
  results["max_rho_drift"] = h.max_rho_drift;

  std::string csv_path = a.csv;
  if (csv_path.empty() && !s.out_path().empty()) {
    csv_path = s.out_path() + ".csv";
  }
  if (!csv_path.empty()) {
    std::ofstream f(csv_path, std::ios::binary);
    if (!f) {
      throw ConfigError("cannot write histogram to '" + csv_path + "'");
    }
    ensemble::write_csv(f, h);
    results["csv"] = csv_path;
  } else {
    results["csv"] = nullptr;
  }
  s.emit("arrival", std::move(results));
  return kSuccess;
}

struct EprArgs {
  std::string axis;
  std::optional<double> bob_dist;
  std::string hidden_boost;
  std::optional<std::uint64_t> pairs;
};

int cmd_epr(Session &s, const EprArgs &a) {
  auto &c = s.cfg();
  if (!a.hidden_boost.empty()) {
    c.protocol.hidden_boost = parse_triple(a.hidden_boost, "--hidden-boost");
  }
  if (a.bob_dist) {
    c.protocol.bob_dist = *a.bob_dist;
  }
  if (a.pairs) {
    c.protocol.n_pairs = *a.pairs;
  }
  c.validate();
  const fields::SpinAxis axis = parse_axis(a.axis);
  json results;
  results["args"] = {{"axis", a.axis}};
  const auto classifier = s.classifier(results);
  const protocol::HiddenFoliation hf(s.hidden_normal());
  const protocol::LabGeometry g = s.base_geometry();
  g.validate(c.protocol.d_min, c.protocol.d_max);
  const protocol::RunRecord r = protocol::simulate_run(
      g, hf, axis, c.protocol.n_pairs, c.ensemble.seed, s.settings(classifier));
  results["event_A"] = event_json(r.event_A);
  results["event_B"] = event_json(r.event_B);
  results["bob_dist"] = r.bob_dist;
  results["n_pairs"] = r.n_pairs;
  results["observed"] = ensemble::to_string(r.observed);
  results["tail_mass"] = r.tail_mass;
  s.emit("epr", std::move(results));
  return kSuccess;
}

struct FoliationArgs {
  std::string hidden_boost;
  std::optional<std::uint64_t> pairs;
};

int cmd_detect_foliation(Session &s, const FoliationArgs &a) {
  auto &c = s.cfg();
  if (!a.hidden_boost.empty()) {
    c.protocol.hidden_boost = parse_triple(a.hidden_boost, "--hidden-boost");
  }
  if (a.pairs) {
    c.protocol.n_pairs = *a.pairs;
  }
  c.validate();
  json results;
  results["args"] = json::object();
  const auto classifier = s.classifier(results);
  const protocol::HiddenFoliation hf(s.hidden_normal());
  const auto report = protocol::detect_foliation(
      hf, protocol::default_orientations(s.base_geometry()), s.search(),
      s.settings(classifier));

  results["recovered"] = normal_json(report.recovered);
  json pairs = json::array();
  for (const auto &p : report.pairs) {
    pairs.push_back({{"label", p.label},
                     {"P_A", event_json(p.pA)},
                     {"P_B", event_json(p.pB)}});
  }
  results["pairs"] = pairs;
  results["iterations_per_orientation"] = report.iterations_per_orientation;
  results["singular_values"] = report.singular_values;
  results["error_bound"] = report.error_bound;
  results["diagnostics"] = {
      {"hidden_normal", normal_json(hf.normal())},
      {"angular_error_vs_truth", *report.angular_error_vs_truth},
      {"within_bound", *report.angular_error_vs_truth <= report.error_bound}};
  s.emit("detect-foliation", std::move(results));
  return kSuccess;
}

struct SignalArgs {
  std::string bits;
  std::optional<std::uint64_t> pairs_per_bit;
  std::string hidden_boost;
};

int cmd_signal(Session &s, const SignalArgs &a) {
  auto &c = s.cfg();
  if (!a.hidden_boost.empty()) {
    c.protocol.hidden_boost = parse_triple(a.hidden_boost, "--hidden-boost");
  }
  const std::vector<int> bits = parse_bits(a.bits);
  const std::uint64_t per_bit = a.pairs_per_bit.value_or(10000);
  if (per_bit == 0) {
    throw ConfigError("--pairs-per-bit: must be at least 1");
  }
  c.validate();
  json results;
  results["args"] = {{"bits", a.bits}, {"pairs_per_bit", per_bit}};
  const auto classifier = s.classifier(results);
  const protocol::HiddenFoliation hf(s.hidden_normal());
  protocol::SimulatedExperiment lab(hf, s.settings(classifier));

  const auto cal =
      protocol::calibrate_signaling(lab, s.base_geometry(), s.search());
  const auto report = protocol::transmit_bits(
      lab, cal.geometry, bits, per_bit,
      rng::derive_seed(c.ensemble.seed, 0x5167));

  std::string decoded;
  for (int b : report.decoded_bits) {
    decoded += b < 0 ? '?' : static_cast<char>('0' + b);
  }
  results["signaling_calibration"] = {{"bob_dist", cal.geometry.bob_dist},
                                      {"adjustments", cal.adjustments},
                                      {"runs", cal.runs}};
  results["sent"] = a.bits;
  results["decoded"] = decoded;
  results["erasures"] = report.erasures;
  results["bit_error_rate"] = report.bit_error_rate;
  s.emit("signal", std::move(results));
  return kSuccess;
}

struct CheckArgs {
  std::string only;
  bool inject_spin_flip{false};
};

int cmd_check(Session &s, const CheckArgs &a, std::ostream &err) {
  auto &c = s.cfg();
  c.validate();
  checks::CheckOptions o;
  o.model = c.model;
  o.integrator = c.integrator;
  o.seed = c.ensemble.seed;
  o.n = c.ensemble.n;
  o.threads = s.threads();
  o.spin_flux_sign = a.inject_spin_flip ? -1.0 : 1.0;

  std::vector<std::string> suites = checks::suite_names();
  if (!a.only.empty()) {
    suites = {a.only};
  }
  json list = json::array();
  bool all = true;
  for (const auto &name : suites) {
    for (const auto &r : checks::run_suite(name, o)) {
      all = all && r.passed;
      err << (r.passed ? "PASS " : "FAIL ") << r.name
          << " measured=" << r.measured << " threshold=" << r.threshold
          << '\n';
      list.push_back({{"name", r.name},
                      {"passed", r.passed},
                      {"measured", r.measured},
                      {"threshold", r.threshold},
                      {"detail", r.detail}});
    }
  }
  json results;
  results["args"] = {{"only", a.only.empty() ? json(nullptr) : json(a.only)},
                     {"inject_spin_flip", a.inject_spin_flip}};
  results["checks"] = list;
  results["all_passed"] = all;
  s.emit("check", std::move(results));
  return all ? kSuccess : kCheckFailed;
}

bool is_usage_error(const Error &e) {
  return dynamic_cast<const ConfigError *>(&e) ||
         dynamic_cast<const BetaOutOfRange *>(&e) ||
         dynamic_cast<const InvalidModel *>(&e) ||
         dynamic_cast<const InvalidIntegratorConfig *>(&e) ||
         dynamic_cast<const InvalidClassifier *>(&e);
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err) {
  CLI::App app{"Spin-dependent arrival times and foliation detection"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--config", global.config_path, "JSON configuration file");
  app.add_option("--seed", global.seed, "Master seed");
  app.add_option("--threads", global.threads,
                 "Worker threads (0 = all cores)");
  app.add_option("--out", global.out_path, "Write the report to this file");

  ArrivalArgs arrival;
  auto *sc_arrival =
      app.add_subcommand("arrival", "Arrival-time distribution at z = L");
  sc_arrival->add_option("--axis", arrival.axis, "Alice's axis: x or z")
      ->required()
      ->check(CLI::IsMember({"x", "z"}));
  sc_arrival->add_option("--order", arrival.order, "alice-first or bob-first")
      ->check(CLI::IsMember({"alice-first", "bob-first"}));
  sc_arrival->add_option("--outcome", arrival.outcome,
                         "Alice's outcome: up, down or random")
      ->check(CLI::IsMember({"up", "down", "random"}));
  sc_arrival->add_option("--n", arrival.n, "Ensemble size");
  sc_arrival->add_option("--csv", arrival.csv, "Histogram CSV path");

  EprArgs epr;
  auto *sc_epr = app.add_subcommand("epr", "One EPRB run");
  sc_epr->add_option("--axis", epr.axis, "Alice's axis: x or z")
      ->required()
      ->check(CLI::IsMember({"x", "z"}));
  sc_epr->add_option("--bob-dist", epr.bob_dist, "Bob's arm length");
  sc_epr->add_option("--hidden-boost", epr.hidden_boost, "bx,by,bz");
  sc_epr->add_option("--pairs", epr.pairs, "Pairs in the run");

  FoliationArgs fol;
  auto *sc_fol = app.add_subcommand("detect-foliation",
                                    "Recover the hidden foliation normal");
  sc_fol->add_option("--hidden-boost", fol.hidden_boost, "bx,by,bz");
  sc_fol->add_option("--pairs", fol.pairs, "Pairs per run");

  SignalArgs sig;
  auto *sc_sig = app.add_subcommand("signal", "Send bits from Alice to Bob");
  sc_sig->add_option("--bits", sig.bits, "Message, e.g. 0110")->required();
  sc_sig->add_option("--pairs-per-bit", sig.pairs_per_bit,
                     "Pairs per bit (default 10000)");
  sc_sig->add_option("--hidden-boost", sig.hidden_boost, "bx,by,bz");

  CheckArgs chk;
  auto *sc_chk = app.add_subcommand("check", "Run the property suites");
  sc_chk->add_option("--only", chk.only, "Run a single suite")
      ->check(CLI::IsMember(checks::suite_names()));
  sc_chk->add_flag("--inject-spin-flip", chk.inject_spin_flip)->group("");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("bohmfol");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char *> argv;
  for (const auto &a : argv_store) {
    argv.push_back(a.c_str());
  }

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    Session session(global, out);
    if (*sc_arrival) {
      return cmd_arrival(session, arrival);
    }
    if (*sc_epr) {
      return cmd_epr(session, epr);
    }
    if (*sc_fol) {
      return cmd_detect_foliation(session, fol);
    }
    if (*sc_sig) {
      return cmd_signal(session, sig);
    }
    return cmd_check(session, chk, err);
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return is_usage_error(e) ? kUsage : kProtocolFailure;
  }
}

} // namespace bohmfol::cli
