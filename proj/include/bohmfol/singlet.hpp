#pragma once

#include <array>
#include <complex>
#include <functional>
#include <memory>

#include "bohmfol/fields.hpp"

// Two-particle singlet state built from closed-form branch packets, its
// density and particle-2 current, and a finite-difference Pauli current used
// as an independent check on the closed forms.
namespace bohmfol::fields {

using Spinor2 = std::array<std::complex<double>, 2>;
/// Two-particle spinor, index 2 * a + b with a for particle 1, b for 2.
using Spinor4 = std::array<std::complex<double>, 4>;

/// Eigenvector of n.sigma with eigenvalue s.
Spinor2 spin_eigenstate(const SpinAxis &axis, SpinOutcome s);

/// Psi(x1, x2) = g0(x2) / sqrt(2) * sum_s s f_s(x1) chi_s(n) (x) chi_-s(n).
struct SingletState {
  std::shared_ptr<const WavePacket> f_plus;
  std::shared_ptr<const WavePacket> f_minus;
  std::shared_ptr<const WavePacket> g0;
  SpinAxis axis{SpinAxis::Z()};

  [[nodiscard]] Spinor4 value(const Vec3 &x1, const Vec3 &x2,
                              double t) const;
};

/// (|g0|^2 / 2)(|f_+|^2 + |f_-|^2).
double singlet_density(const SingletState &psi, const Vec3 &x1,
                       const Vec3 &x2, double t);

/// Closed-form particle-2 current
/// (|g0|^2 / 2) sum_s |f_s|^2 [grad S0 - s (grad|g0|/|g0|) x n].
/// Throws ZeroAmplitude where g0 vanishes.
Vec3 singlet_current2_closed(const SingletState &psi, const Vec3 &x1,
                             const Vec3 &x2, double t);

using SpinorSampler = std::function<Spinor2(const Vec3 &)>;
using PairSpinorSampler = std::function<Spinor4(const Vec3 &, const Vec3 &)>;

/// Im[psi^dagger grad psi] + (1/2) curl(psi^dagger sigma psi) by central
/// differences of step h. `spin_flux_sign` scales the curl term; it is +1
/// for the physical current and exists so callers can inject a mutation.
Vec3 pauli_current_numeric(const SpinorSampler &psi, const Vec3 &x, double h,
                           double spin_flux_sign = 1.0);

/// Current of particle `particle` (1 or 2) of a two-particle spinor, the
/// other particle's spin index traced out.
Vec3 pauli_current_numeric(const PairSpinorSampler &psi, const Vec3 &x1,
                           const Vec3 &x2, int particle, double h,
                           double spin_flux_sign = 1.0);

} // namespace bohmfol::fields
