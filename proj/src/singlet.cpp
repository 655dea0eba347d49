#include "bohmfol/singlet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bohmfol::fields {

namespace {

using cd = std::complex<double>;

Vec3 spin_density(const Spinor2 &u) {
  const cd a = u[0];
  const cd b = u[1];
  const cd ab = std::conj(a) * b;
  return {2.0 * ab.real(), 2.0 * ab.imag(), std::norm(a) - std::norm(b)};
}

template <class Sample>
Vec3 current_from(const Sample &sample, const Vec3 &x, double h,
                  double spin_flux_sign) {
  // sample(p) returns the list of two-component blocks at p; the traced
  // index runs over the blocks.
  const auto centre = sample(x);
  const Vec3 e[3] = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};

  double convective[3]{};
  Vec3 dspin[3]{};
  for (int k = 0; k < 3; ++k) {
    const auto plus = sample(x + h * e[k]);
    const auto minus = sample(x - h * e[k]);
    double conv = 0.0;
    Vec3 sp{}, sm{};
    for (std::size_t blk = 0; blk < centre.size(); ++blk) {
      for (int c = 0; c < 2; ++c) {
        const cd deriv = (plus[blk][c] - minus[blk][c]) / (2.0 * h);
        conv += (std::conj(centre[blk][c]) * deriv).imag();
      }
      sp += spin_density(plus[blk]);
      sm += spin_density(minus[blk]);
    }
    convective[k] = conv;
    dspin[k] = (sp - sm) / (2.0 * h);
  }
  // curl S with dspin[k] = d S / d x_k
  const Vec3 curl{dspin[1].z - dspin[2].y, dspin[2].x - dspin[0].z,
                  dspin[0].y - dspin[1].x};
  return Vec3{convective[0], convective[1], convective[2]} +
         0.5 * spin_flux_sign * curl;
}

} // namespace

Spinor2 spin_eigenstate(const SpinAxis &axis, SpinOutcome s) {
  const Vec3 &n = axis.n();
  const double theta = std::acos(std::clamp(n.z, -1.0, 1.0));
  const double phi = std::atan2(n.y, n.x);
  const double c = std::cos(0.5 * theta);
  const double sn = std::sin(0.5 * theta);
  if (s == SpinOutcome::Up) {
    return {cd(c, 0.0), std::polar(sn, phi)};
  }
  return {-std::polar(sn, -phi), cd(c, 0.0)};
}

Spinor4 SingletState::value(const Vec3 &x1, const Vec3 &x2, double t) const {
  const cd g = g0->value(x2, t) * std::numbers::sqrt2 * 0.5;
  Spinor4 out{};
  for (SpinOutcome s : {SpinOutcome::Up, SpinOutcome::Down}) {
    const auto &f = s == SpinOutcome::Up ? f_plus : f_minus;
    const cd amp = sign_of(s) * f->value(x1, t) * g;
    const Spinor2 c1 = spin_eigenstate(axis, s);
    const Spinor2 c2 = spin_eigenstate(axis, flipped(s));
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        out[static_cast<std::size_t>(2 * a + b)] += amp * c1[a] * c2[b];
      }
    }
  }
  return out;
}

double singlet_density(const SingletState &psi, const Vec3 &x1,
                       const Vec3 &x2, double t) {
  const double g2 = std::norm(psi.g0->value(x2, t));
  return 0.5 * g2 *
         (std::norm(psi.f_plus->value(x1, t)) +
          std::norm(psi.f_minus->value(x1, t)));
}

Vec3 singlet_current2_closed(const SingletState &psi, const Vec3 &x1,
                             const Vec3 &x2, double t) {
  const double g_abs = psi.g0->amplitude(x2, t);
  if (!(g_abs > 0.0)) {
    throw ZeroAmplitude("particle-2 packet vanishes at the evaluation point");
  }
  const Vec3 grad_s0 = psi.g0->phase_gradient(x2, t);
  const Vec3 spin =
      cross(psi.g0->log_amplitude_gradient(x2, t), psi.axis.n());
  const double fp2 = std::norm(psi.f_plus->value(x1, t));
  const double fm2 = std::norm(psi.f_minus->value(x1, t));
  const double pref = 0.5 * g_abs * g_abs;
  return pref * ((fp2 + fm2) * grad_s0 - (fp2 - fm2) * spin);
}

Vec3 pauli_current_numeric(const SpinorSampler &psi, const Vec3 &x, double h,
                           double spin_flux_sign) {
  const auto sample = [&](const Vec3 &p) {
    return std::array<Spinor2, 1>{psi(p)};
  };
  return current_from(sample, x, h, spin_flux_sign);
}

Vec3 pauli_current_numeric(const PairSpinorSampler &psi, const Vec3 &x1,
                           const Vec3 &x2, int particle, double h,
                           double spin_flux_sign) {
  if (particle != 1 && particle != 2) {
    throw DomainError("particle index must be 1 or 2");
  }
  const auto sample = [&](const Vec3 &p) {
    const Spinor4 v = particle == 1 ? psi(p, x2) : psi(x1, p);
    std::array<Spinor2, 2> blocks{};
    for (int other = 0; other < 2; ++other) {
      for (int own = 0; own < 2; ++own) {
        const int idx = particle == 1 ? 2 * own + other : 2 * other + own;
        blocks[static_cast<std::size_t>(other)][static_cast<std::size_t>(
            own)] = v[static_cast<std::size_t>(idx)];
      }
    }
    return blocks;
  };
  return current_from(sample, particle == 1 ? x1 : x2, h, spin_flux_sign);
}

} // namespace bohmfol::fields
