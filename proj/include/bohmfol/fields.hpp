#pragma once

#include <complex>
#include <string>
#include <variant>

#include "bohmfol/errors.hpp"
#include "bohmfol/vec3.hpp"

// Closed-form waveguide wave packet and the Bohmian velocity fields built on
// it. Natural units hbar = m = omega_z = 1 throughout.
namespace bohmfol::fields {

/// Longitudinal profile of the initial packet.
enum class ZMode {
  HalfOscillator,    ///< sqrt(4/sqrt(pi)) z exp(-z^2/2) for z > 0
  TruncatedGaussian, ///< sqrt(2/sqrt(pi)) exp(-z^2/2) for z > 0
};

/// Convective (phase-gradient) part of the particle-2 guiding field.
enum class ConvectionMode {
  ExactDND,  ///< t z / (1 + t^2) along the guide
  ConstantK, ///< plane-wave approximation, constant k2 along the guide
};

std::string to_string(ZMode m);
std::string to_string(ConvectionMode m);
ZMode parse_z_mode(const std::string &s);
ConvectionMode parse_conv_mode(const std::string &s);

struct WaveguideModel {
  double omega{1.0}; ///< transverse trap frequency
  double L{5.0};     ///< detector plane z = L
  ZMode z_mode{ZMode::HalfOscillator};
  ConvectionMode conv_mode{ConvectionMode::ExactDND};
  double k2{1.0}; ///< only read in ConstantK mode

  /// Throws InvalidModel on omega <= 0, L <= 0 or (ConstantK and k2 <= 0).
  void validate() const;
};

/// Unit quantization axis.
class SpinAxis {
public:
  /// Throws DomainError unless |n| = 1 within 1e-12.
  explicit SpinAxis(const Vec3 &n);

  static SpinAxis X() { return SpinAxis(Vec3{1.0, 0.0, 0.0}); }
  static SpinAxis Z() { return SpinAxis(Vec3{0.0, 0.0, 1.0}); }
  /// Normalizes a non-zero direction.
  static SpinAxis along(const Vec3 &direction);

  [[nodiscard]] const Vec3 &n() const { return n_; }

  friend bool operator==(const SpinAxis &, const SpinAxis &) = default;

private:
  Vec3 n_;
};

std::string axis_label(const SpinAxis &a);

enum class SpinOutcome : int { Up = 1, Down = -1 };

constexpr double sign_of(SpinOutcome s) {
  return s == SpinOutcome::Up ? 1.0 : -1.0;
}
constexpr SpinOutcome flipped(SpinOutcome s) {
  return s == SpinOutcome::Up ? SpinOutcome::Down : SpinOutcome::Up;
}

struct BranchWeights {
  double plus{0.5};
  double minus{0.5};
};

/// (d_rho |G| / |G|, d_z |G| / |G|) of the freely dispersing packet.
struct LogAmpGradient {
  double d_rho{0.0};
  double d_z{0.0};
};

/// |Psi_0(x)|^2, normalized over the half space z > 0 and zero elsewhere.
double initial_density(const WaveguideModel &m, const Vec3 &x);

/// Marginal CDF of the initial longitudinal coordinate.
double initial_z_cdf(const WaveguideModel &m, double z);

inline LogAmpGradient log_amp_gradients(const WaveguideModel &m, double rho,
                                        double z, double t) {
  const double width2 = 1.0 + t * t;
  double dz = -z / width2;
  if (m.z_mode == ZMode::HalfOscillator) {
    if (!(z > 0.0)) {
      throw DomainError("half-oscillator packet is undefined at z <= 0");
    }
    dz += 1.0 / z;
  }
  return {-m.omega * rho, dz};
}

/// Cartesian log-amplitude gradient, (-omega x, -omega y, d_z).
inline Vec3 log_amp_gradient(const WaveguideModel &m, const Vec3 &x,
                             double t) {
  const LogAmpGradient g = log_amp_gradients(m, 0.0, x.z, t);
  return {-m.omega * x.x, -m.omega * x.y, g.d_z};
}

inline Vec3 convective_velocity(const WaveguideModel &m, const Vec3 &x,
                                double t) {
  if (m.conv_mode == ConvectionMode::ConstantK) {
    return {0.0, 0.0, m.k2};
  }
  return {0.0, 0.0, t * x.z / (1.0 + t * t)};
}

/// Spin-conditional field of particle 2 when Alice obtained `alice_outcome`
/// along `axis`: grad S0 - s (grad|G|/|G|) x n. Particle 2 carries spin -s.
inline Vec3 conditional_velocity(const WaveguideModel &m, const SpinAxis &axis,
                                 SpinOutcome alice_outcome, const Vec3 &x,
                                 double t) {
  const Vec3 spin = cross(log_amp_gradient(m, x, t), axis.n());
  return convective_velocity(m, x, t) - sign_of(alice_outcome) * spin;
}

/// w_s = |f_s|^2 / (|f_+|^2 + |f_-|^2). Throws BothZero.
BranchWeights weights(double f_plus_abs2, double f_minus_abs2);

/// w_+ v_+ + w_- v_-, where v_s is the field of branch s.
inline Vec3 mixed_velocity(const BranchWeights &w, const Vec3 &v_plus_branch,
                           const Vec3 &v_minus_branch) {
  return w.plus * v_plus_branch + w.minus * v_minus_branch;
}

/// Alice measured first along `axis` and obtained `outcome`.
struct AliceFirst {
  SpinAxis axis;
  SpinOutcome outcome;
};
/// Bob released particle 2 before Alice's measurement.
struct BobFirst {};

using Scenario = std::variant<AliceFirst, BobFirst>;

Vec3 scenario_velocity(const WaveguideModel &m, const Scenario &scenario,
                       const Vec3 &x, double t);

/// Axial-reversal condition s (1/k2) (d_rho|G|/|G|) sin(phi) < -1 of the
/// transverse field. Only meaningful in ConstantK mode (ModeError otherwise).
bool backflow_predicate(const WaveguideModel &m, SpinOutcome s, const Vec3 &x,
                        double t);

/// Spatial wave function in polar form, with analytic gradients.
class WavePacket {
public:
  virtual ~WavePacket() = default;
  [[nodiscard]] virtual std::complex<double> value(const Vec3 &x,
                                                   double t) const = 0;
  [[nodiscard]] virtual Vec3 log_amplitude_gradient(const Vec3 &x,
                                                    double t) const = 0;
  [[nodiscard]] virtual Vec3 phase_gradient(const Vec3 &x, double t) const = 0;
  [[nodiscard]] virtual double amplitude(const Vec3 &x, double t) const {
    return std::abs(value(x, t));
  }
};

/// Static normalized Gaussian times a plane wave:
/// (2 pi sigma^2)^(-3/4) exp(-|x-c|^2 / (4 sigma^2) + i k.x).
class GaussianPacket final : public WavePacket {
public:
  GaussianPacket(const Vec3 &center, double sigma, const Vec3 &k);

  [[nodiscard]] std::complex<double> value(const Vec3 &x,
                                           double t) const override;
  [[nodiscard]] Vec3 log_amplitude_gradient(const Vec3 &x,
                                            double t) const override;
  [[nodiscard]] Vec3 phase_gradient(const Vec3 &x, double t) const override;

private:
  Vec3 center_;
  double sigma_;
  Vec3 k_;
};

/// The freely dispersing waveguide packet g0(x, t).
class WaveguidePacket final : public WavePacket {
public:
  explicit WaveguidePacket(const WaveguideModel &m);

  [[nodiscard]] std::complex<double> value(const Vec3 &x,
                                           double t) const override;
  [[nodiscard]] Vec3 log_amplitude_gradient(const Vec3 &x,
                                            double t) const override;
  [[nodiscard]] Vec3 phase_gradient(const Vec3 &x, double t) const override;

private:
  WaveguideModel model_;
};

/// grad S1 + s (grad|f|/|f|) x n: particle-1 branch field (plus sign).
/// Throws ZeroAmplitude where |f| vanishes.
Vec3 particle1_conditional_velocity(const WavePacket &f, const SpinAxis &axis,
                                    SpinOutcome s, const Vec3 &x1, double t);

/// grad S0 - s (grad|g0|/|g0|) x n for an arbitrary particle-2 packet.
Vec3 particle2_conditional_velocity(const WavePacket &g0, const SpinAxis &axis,
                                    SpinOutcome s, const Vec3 &x2, double t);

} // namespace bohmfol::fields
