#include "bohmfol/trajectories.hpp"

#include <cmath>
#include <string>

namespace bohmfol::trajectories {

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidIntegratorConfig("dt must be positive");
  }
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw InvalidIntegratorConfig("t_max must be positive");
  }
  if (!(crossing_tol > 0.0) || crossing_tol > dt) {
    throw InvalidIntegratorConfig("crossing_tol must lie in (0, dt]");
  }
  if (!(blowup_bound > 0.0)) {
    throw InvalidIntegratorConfig("blowup_bound must be positive");
  }
}

ArrivalRecord integrate_until_crossing(const VelocityField &field,
                                       const Vec3 &x0,
                                       const IntegratorConfig &cfg, double L) {
  cfg.validate();
  return detail::integrate(field, x0, cfg, L, detail::NoObserver{});
}

std::vector<TracePoint> trajectory_trace(const VelocityField &field,
                                         const Vec3 &x0,
                                         const IntegratorConfig &cfg,
                                         int sample_stride, double L) {
  cfg.validate();
  if (sample_stride < 1) {
    throw InvalidIntegratorConfig("sample_stride must be at least 1");
  }
  std::vector<TracePoint> path;
  long long step = 0;
  const auto observe = [&](double t, const Vec3 &x, bool final) {
    if (final || step++ % sample_stride == 0) {
      path.push_back({t, x, field(x, t)});
    }
  };
  detail::integrate(field, x0, cfg, L, observe);
  return path;
}

} // namespace bohmfol::trajectories
