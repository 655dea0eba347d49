#include "bohmfol/fields.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace bohmfol::fields {

namespace {
constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;
constexpr double kAxisTolerance = 1e-12;
} // namespace

std::string to_string(ZMode m) {
  return m == ZMode::HalfOscillator ? "half-oscillator" : "truncated-gaussian";
}

std::string to_string(ConvectionMode m) {
  return m == ConvectionMode::ExactDND ? "exact-dnd" : "constant-k";
}

ZMode parse_z_mode(const std::string &s) {
  if (s == "half-oscillator") {
    return ZMode::HalfOscillator;
  }
  if (s == "truncated-gaussian") {
    return ZMode::TruncatedGaussian;
  }
  throw InvalidModel("unknown z_mode '" + s +
                     "' (expected half-oscillator or truncated-gaussian)");
}

ConvectionMode parse_conv_mode(const std::string &s) {
  if (s == "exact-dnd") {
    return ConvectionMode::ExactDND;
  }
  if (s == "constant-k") {
    return ConvectionMode::ConstantK;
  }
  throw InvalidModel("unknown conv_mode '" + s +
                     "' (expected exact-dnd or constant-k)");
}

void WaveguideModel::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw InvalidModel("omega must be a positive finite number");
  }
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw InvalidModel("L must be a positive finite number");
  }
  if (conv_mode == ConvectionMode::ConstantK &&
      (!(k2 > 0.0) || !std::isfinite(k2))) {
    throw InvalidModel("k2 must be positive in constant-k mode");
  }
}

SpinAxis::SpinAxis(const Vec3 &n) : n_(n) {
  if (!n.finite() || std::abs(n.norm() - 1.0) > kAxisTolerance) {
    std::ostringstream msg;
    msg << "spin axis " << n << " is not a unit vector";
    throw DomainError(msg.str());
  }
}

SpinAxis SpinAxis::along(const Vec3 &direction) {
  const double len = direction.norm();
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw DomainError("spin axis direction must be non-zero and finite");
  }
  return SpinAxis(direction / len);
}

std::string axis_label(const SpinAxis &a) {
  if (a == SpinAxis::X()) {
    return "x";
  }
  if (a == SpinAxis::Z()) {
    return "z";
  }
  std::ostringstream os;
  os << a.n();
  return os.str();
}

double initial_density(const WaveguideModel &m, const Vec3 &x) {
  if (!(x.z > 0.0)) {
    return 0.0;
  }
  const double transverse =
      m.omega * std::numbers::inv_pi * std::exp(-m.omega * x.rho() * x.rho());
  const double z2 = x.z * x.z;
  const double longitudinal = m.z_mode == ZMode::HalfOscillator
                                  ? 4.0 * kInvSqrtPi * z2 * std::exp(-z2)
                                  : 2.0 * kInvSqrtPi * std::exp(-z2);
  return transverse * longitudinal;
}

double initial_z_cdf(const WaveguideModel &m, double z) {
  if (!(z > 0.0)) {
    return 0.0;
  }
  if (m.z_mode == ZMode::HalfOscillator) {
    return std::erf(z) - 2.0 * kInvSqrtPi * z * std::exp(-z * z);
  }
  return std::erf(z);
}

BranchWeights weights(double f_plus_abs2, double f_minus_abs2) {
  if (!(f_plus_abs2 >= 0.0) || !(f_minus_abs2 >= 0.0)) {
    throw DomainError("branch densities must be non-negative");
  }
  const double total = f_plus_abs2 + f_minus_abs2;
  if (total == 0.0) {
    throw BothZero("particle 1 lies outside both branch supports");
  }
  const double plus = f_plus_abs2 / total;
  return {plus, 1.0 - plus};
}

Vec3 scenario_velocity(const WaveguideModel &m, const Scenario &scenario,
                       const Vec3 &x, double t) {
  if (const auto *af = std::get_if<AliceFirst>(&scenario)) {
    return conditional_velocity(m, af->axis, af->outcome, x, t);
  }
  return convective_velocity(m, x, t);
}

bool backflow_predicate(const WaveguideModel &m, SpinOutcome s, const Vec3 &x,
                        double t) {
  if (m.conv_mode != ConvectionMode::ConstantK) {
    throw ModeError("backflow predicate requires constant-k convection; use "
                    "the trajectory min_vz in exact-dnd mode");
  }
  const double rho = x.rho();
  if (rho == 0.0) {
    return false;
  }
  const LogAmpGradient g = log_amp_gradients(m, rho, x.z, t);
  const double sin_phi = x.y / rho;
  return sign_of(s) * g.d_rho * sin_phi / m.k2 < -1.0;
}

GaussianPacket::GaussianPacket(const Vec3 &center, double sigma, const Vec3 &k)
    : center_(center), sigma_(sigma), k_(k) {
  if (!(sigma > 0.0)) {
    throw DomainError("Gaussian packet width must be positive");
  }
}

std::complex<double> GaussianPacket::value(const Vec3 &x, double) const {
  const double norm =
      std::pow(2.0 * std::numbers::pi * sigma_ * sigma_, -0.75);
  const double amp =
      norm * std::exp(-(x - center_).norm2() / (4.0 * sigma_ * sigma_));
  return std::polar(amp, dot(k_, x));
}

Vec3 GaussianPacket::log_amplitude_gradient(const Vec3 &x, double) const {
  return -(x - center_) / (2.0 * sigma_ * sigma_);
}

Vec3 GaussianPacket::phase_gradient(const Vec3 &, double) const { return k_; }

WaveguidePacket::WaveguidePacket(const WaveguideModel &m) : model_(m) {
  model_.validate();
}

std::complex<double> WaveguidePacket::value(const Vec3 &x, double t) const {
  using namespace std::complex_literals;
  if (!(x.z > 0.0)) {
    return 0.0;
  }
  const double w = model_.omega;
  const double rho2 = x.x * x.x + x.y * x.y;
  const std::complex<double> transverse =
      std::sqrt(w * std::numbers::inv_pi) * std::exp(-0.5 * w * rho2) *
      std::exp(-1i * w * t);

  const std::complex<double> spread = 1.0 + 1i * t;
  const std::complex<double> gauss = std::exp(-x.z * x.z / (2.0 * spread));
  std::complex<double> longitudinal;
  if (model_.z_mode == ZMode::HalfOscillator) {
    longitudinal = std::sqrt(4.0 * kInvSqrtPi) * x.z * std::pow(spread, -1.5) *
                   gauss;
  } else {
    longitudinal =
        std::sqrt(2.0 * kInvSqrtPi) * std::pow(spread, -0.5) * gauss;
  }
  if (model_.conv_mode == ConvectionMode::ConstantK) {
    longitudinal = std::polar(std::abs(longitudinal), model_.k2 * x.z);
  }
  return transverse * longitudinal;
}

Vec3 WaveguidePacket::log_amplitude_gradient(const Vec3 &x, double t) const {
  return log_amp_gradient(model_, x, t);
}

Vec3 WaveguidePacket::phase_gradient(const Vec3 &x, double t) const {
  return convective_velocity(model_, x, t);
}

Vec3 particle1_conditional_velocity(const WavePacket &f, const SpinAxis &axis,
                                    SpinOutcome s, const Vec3 &x1, double t) {
  if (!(f.amplitude(x1, t) > 0.0)) {
    throw ZeroAmplitude("particle-1 packet vanishes at the evaluation point");
  }
  return f.phase_gradient(x1, t) +
         sign_of(s) * cross(f.log_amplitude_gradient(x1, t), axis.n());
}

Vec3 particle2_conditional_velocity(const WavePacket &g0, const SpinAxis &axis,
                                    SpinOutcome s, const Vec3 &x2, double t) {
  if (!(g0.amplitude(x2, t) > 0.0)) {
    throw ZeroAmplitude("particle-2 packet vanishes at the evaluation point");
  }
  return g0.phase_gradient(x2, t) -
         sign_of(s) * cross(g0.log_amplitude_gradient(x2, t), axis.n());
}

} // namespace bohmfol::fields
