#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "bohmfol/errors.hpp"
#include "bohmfol/vec3.hpp"

namespace bohmfol::trajectories {

struct IntegratorConfig {
  double dt{1e-3};
  double t_max{50.0};
  double crossing_tol{1e-10};
  double blowup_bound{1e6}; ///< |v| above this raises FieldBlowup

  /// Throws InvalidIntegratorConfig.
  void validate() const;
};

struct Arrival {
  double tau{0.0};
  Vec3 point{};
};

struct ArrivalRecord {
  std::optional<Arrival> arrival; ///< empty: no crossing before t_max
  double min_vz{std::numeric_limits<double>::infinity()};
  double rho_drift{0.0};
  bool wall_guard_hit{false};

  [[nodiscard]] bool arrived() const { return arrival.has_value(); }
};

/// Positions closer than this to the wall z = 0 are clamped onto it.
inline constexpr double kWallGuard = 1e-12;

using VelocityField = std::function<Vec3(const Vec3 &, double)>;

namespace detail {

// A step is split in halves while a single RK4 stage would move the particle
// by more than this fraction of its distance to the wall.
inline constexpr double kMaxWallFraction = 0.05;
inline constexpr int kMaxSplitDepth = 24;
// Below this height steps are no longer split, so a field driving the
// particle into the wall costs a bounded number of sub-steps.
inline constexpr double kSplitFloor = 1e-6;

struct Stepper {
  const IntegratorConfig &cfg;
  bool wall_hit{false};

  template <class Field>
  Vec3 eval(const Field &f, Vec3 x, double t) {
    if (x.z < kWallGuard) {
      x.z = kWallGuard;
      wall_hit = true;
    }
    const Vec3 v = f(x, t);
    if (!v.finite() || v.norm2() > cfg.blowup_bound * cfg.blowup_bound) {
      throw FieldBlowup("velocity magnitude exceeded the blow-up bound at t = " +
                        std::to_string(t));
    }
    return v;
  }

  template <class Field>
  Vec3 rk4(const Field &f, const Vec3 &x, double t, double h, const Vec3 &k1) {
    const Vec3 k2 = eval(f, x + (0.5 * h) * k1, t + 0.5 * h);
    const Vec3 k3 = eval(f, x + (0.5 * h) * k2, t + 0.5 * h);
    const Vec3 k4 = eval(f, x + h * k3, t + h);
    Vec3 next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (next.z < kWallGuard) {
      next.z = kWallGuard;
      wall_hit = true;
    }
    return next;
  }
};

struct NoObserver {
  void operator()(double, const Vec3 &, bool) const {}
};

template <class Field, class Observer>
ArrivalRecord integrate(const Field &field, const Vec3 &x0,
                        const IntegratorConfig &cfg, double L,
                        Observer &&observe) {
  ArrivalRecord rec;
  const double rho0 = x0.rho();
  if (x0.z >= L) {
    rec.arrival = Arrival{0.0, x0};
    observe(0.0, x0, true);
    return rec;
  }
  Stepper st{cfg};
  Vec3 x = x0;
  double t = 0.0;

  // Advances (x, t) by h, possibly in pieces; returns true on crossing.
  const auto advance = [&](auto &self, double h, int depth) -> bool {
    const Vec3 k1 = st.eval(field, x, t);
    rec.min_vz = std::min(rec.min_vz, k1.z);
    rec.rho_drift = std::max(rec.rho_drift, std::abs(x.rho() - rho0));
    if (depth < kMaxSplitDepth && x.z > kSplitFloor &&
        k1.norm() * h > kMaxWallFraction * x.z) {
      return self(self, 0.5 * h, depth + 1) || self(self, 0.5 * h, depth + 1);
    }
    const Vec3 next = st.rk4(field, x, t, h, k1);
    if (next.z < L) {
      x = next;
      t += h;
      return false;
    }
    // z(t + s) - L changes sign on (0, h]; bisect on the sub-step length.
    double lo = 0.0;
    double hi = h;
    Vec3 at_hi = next;
    while (hi - lo > cfg.crossing_tol) {
      const double mid = 0.5 * (lo + hi);
      const Vec3 p = st.rk4(field, x, t, mid, k1);
      if (p.z >= L) {
        hi = mid;
        at_hi = p;
      } else {
        lo = mid;
      }
    }
    x = at_hi;
    t += hi;
    return true;
  };

  const auto n_steps = static_cast<long long>(std::ceil(cfg.t_max / cfg.dt));
  for (long long i = 0; i < n_steps; ++i) {
    observe(t, x, false);
    const double h = std::min(cfg.dt, cfg.t_max - t);
    if (!(h > 0.0)) {
      break;
    }
    if (advance(advance, h, 0)) {
      rec.arrival = Arrival{t, x};
      break;
    }
  }
  rec.rho_drift = std::max(rec.rho_drift, std::abs(x.rho() - rho0));
  rec.wall_guard_hit = st.wall_hit;
  observe(t, x, true);
  return rec;
}

} // namespace detail

/// Classical RK4 with fixed step cfg.dt from (x0, t = 0) until z first
/// reaches L, with the crossing time refined by bisection to crossing_tol.
/// Near the wall a step is subdivided (deterministically) so one stage never
/// moves the particle by more than a small fraction of its wall distance.
template <class Field>
ArrivalRecord integrate_until_crossing(const Field &field, const Vec3 &x0,
                                       const IntegratorConfig &cfg, double L) {
  cfg.validate();
  return detail::integrate(field, x0, cfg, L, detail::NoObserver{});
}

ArrivalRecord integrate_until_crossing(const VelocityField &field,
                                       const Vec3 &x0,
                                       const IntegratorConfig &cfg, double L);

/// Position at t_end under the same stepping (no detector plane).
template <class Field>
Vec3 evolve(const Field &field, const Vec3 &x0, const IntegratorConfig &cfg,
            double t_end) {
  if (!(t_end > 0.0)) {
    return x0;
  }
  IntegratorConfig run = cfg;
  run.t_max = t_end;
  run.crossing_tol = std::min(run.crossing_tol, run.dt);
  run.validate();
  Vec3 last = x0;
  detail::integrate(field, x0, run, std::numeric_limits<double>::infinity(),
                    [&](double, const Vec3 &x, bool) { last = x; });
  return last;
}

struct TracePoint {
  double t{0.0};
  Vec3 x{};
  Vec3 v{};
};

/// Path sampled every `sample_stride` steps (plus the final point), with the
/// same dynamics as integrate_until_crossing. Stops at z = L when L is finite.
std::vector<TracePoint>
trajectory_trace(const VelocityField &field, const Vec3 &x0,
                 const IntegratorConfig &cfg, int sample_stride,
                 double L = std::numeric_limits<double>::infinity());

} // namespace bohmfol::trajectories
