#include "bohmfol/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "bohmfol/ensemble.hpp"
#include "bohmfol/singlet.hpp"

namespace bohmfol::checks {

namespace {

constexpr int kConfigurations = 100;

fields::SingletState random_singlet(const fields::WaveguideModel &m,
                                    rng::Stream &rng) {
  fields::SingletState psi;
  psi.f_plus = std::make_shared<fields::GaussianPacket>(
      Vec3{-3.0, 0.0, 0.0}, 1.0, Vec3{-0.5, 0.2, 0.0});
  psi.f_minus = std::make_shared<fields::GaussianPacket>(
      Vec3{-3.0, 1.0, 0.5}, 0.8, Vec3{0.1, -0.4, 0.3});
  psi.g0 = std::make_shared<fields::WaveguidePacket>(m);
  psi.axis = fields::SpinAxis::along(
      {rng.normal(0.0, 1.0), rng.normal(0.0, 1.0), rng.normal(0.0, 1.0)});
  return psi;
}

} // namespace

std::vector<CheckResult> check_currents(const CheckOptions &o) {
  rng::Stream rng(o.seed, 0xc0ffee);
  double worst_current = 0.0;
  double worst_velocity = 0.0;
  for (int k = 0; k < kConfigurations; ++k) {
    const fields::SingletState psi = random_singlet(o.model, rng);
    Vec3 x2 = ensemble::sample_initial(o.model, rng);
    x2.z = std::max(x2.z, 0.05);
    const Vec3 x1 = Vec3{-3.0, 0.5, 0.25} +
                    Vec3{rng.normal(0.0, 1.0), rng.normal(0.0, 1.0),
                         rng.normal(0.0, 1.0)};
    const double t = 3.0 * rng.uniform();

    const Vec3 closed = fields::singlet_current2_closed(psi, x1, x2, t);
    const auto sampler = [&](const Vec3 &a, const Vec3 &b) {
      return psi.value(a, b, t);
    };
    const Vec3 numeric = fields::pauli_current_numeric(
        sampler, x1, x2, 2, kFdStep, o.spin_flux_sign);

    // Relative to the current scale: density times the speed scale of the
    // convective and spin terms.
    const double rho = fields::singlet_density(psi, x1, x2, t);
    const double scale =
        rho * (psi.g0->phase_gradient(x2, t).norm() +
               psi.g0->log_amplitude_gradient(x2, t).norm());
    worst_current = std::max(worst_current, (numeric - closed).norm() / scale);

    const auto w = fields::weights(std::norm(psi.f_plus->value(x1, t)),
                                   std::norm(psi.f_minus->value(x1, t)));
    const Vec3 v_plus = fields::particle2_conditional_velocity(
        *psi.g0, psi.axis, fields::SpinOutcome::Up, x2, t);
    const Vec3 v_minus = fields::particle2_conditional_velocity(
        *psi.g0, psi.axis, fields::SpinOutcome::Down, x2, t);
    const Vec3 mixed = fields::mixed_velocity(w, v_plus, v_minus);
    const Vec3 ratio = (1.0 / rho) * closed;
    worst_velocity = std::max(worst_velocity, (mixed - ratio).norm() /
                                                  std::max(1.0, mixed.norm()));
  }
  return {
      {"currents/numeric-vs-closed", worst_current < kCurrentRelTol,
       worst_current, kCurrentRelTol,
       "worst relative deviation over 100 configurations"},
      {"currents/velocity-identity", worst_velocity < kVelocityTol,
       worst_velocity, kVelocityTol,
       "mixed branch velocity vs current / density"},
  };
}

CheckResult check_equivariance(const CheckOptions &o) {
  const double ks = ensemble::equivariance_check(o.model, 2.0, o.n, rng::derive_seed(o.seed, 1),
                                                 o.integrator, o.threads);
  return {"equivariance", ks < kKsTol, ks, kKsTol,
          "KS distance at t = 2, N = " + std::to_string(o.n)};
}

CheckResult check_pushforward(const CheckOptions &o) {
  fields::WaveguideModel m = o.model;
  m.conv_mode = fields::ConvectionMode::ExactDND;
  const auto h = ensemble::arrival_distribution(
      m, ensemble::EnsembleScenario::alice_first(fields::SpinAxis::Z()), o.n,
      rng::derive_seed(o.seed, 2), o.integrator, {}, o.threads);
  // Trajectories past the horizon count at +infinity.
  std::vector<double> taus = h.sorted_taus();
  taus.resize(h.n_total, std::numeric_limits<double>::infinity());
  const double ks = ensemble::ks_statistic(
      taus, [&](double T) { return ensemble::longitudinal_tau_cdf(m, T); });
  return {"pushforward", ks < kKsTol, ks, kKsTol,
          "longitudinal arrival CDF, N = " + std::to_string(o.n)};
}

std::vector<std::string> suite_names() {
  return {"currents", "equivariance", "pushforward"};
}

std::vector<CheckResult> run_suite(const std::string &name,
                                   const CheckOptions &o) {
  if (name == "currents") {
    return check_currents(o);
  }
  if (name == "equivariance") {
    return {check_equivariance(o)};
  }
  if (name == "pushforward") {
    return {check_pushforward(o)};
  }
  throw DomainError("unknown check suite '" + name + "'");
}

} // namespace bohmfol::checks
