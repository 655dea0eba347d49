#include <cmath>
#include <complex>
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "bohmfol/errors.hpp"
#include "bohmfol/fields.hpp"
#include "bohmfol/singlet.hpp"
#include "oracles.hpp"

namespace f = bohmfol::fields;
using bohmfol::Vec3;
using cplx = std::complex<double>;
using oracle::random_config;
using oracle::reference_current2;
using oracle::singlet_value;

namespace {

const double kPi = std::acos(-1.0);

void expect_vec_near(const Vec3 &a, const Vec3 &b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

// exp(i k.x) with unit amplitude everywhere.
class PlaneWave final : public f::WavePacket {
public:
  explicit PlaneWave(const Vec3 &k, double amp = 1.0) : k_(k), amp_(amp) {}
  cplx value(const Vec3 &x, double) const override {
    return amp_ * std::exp(cplx(0.0, dot(k_, x)));
  }
  Vec3 log_amplitude_gradient(const Vec3 &, double) const override {
    return {};
  }
  Vec3 phase_gradient(const Vec3 &, double) const override { return k_; }

private:
  Vec3 k_;
  double amp_;
};

class Zero final : public f::WavePacket {
public:
  cplx value(const Vec3 &, double) const override { return 0.0; }
  Vec3 log_amplitude_gradient(const Vec3 &, double) const override {
    return {};
  }
  Vec3 phase_gradient(const Vec3 &, double) const override { return {}; }
};

} // namespace

TEST(WaveguideModel, Validation) {
  f::WaveguideModel m;
  EXPECT_NO_THROW(m.validate());
  m.omega = 0.0;
  EXPECT_THROW(m.validate(), bohmfol::InvalidModel);
  m = {};
  m.L = -1.0;
  EXPECT_THROW(m.validate(), bohmfol::InvalidModel);
  m = {};
  m.conv_mode = f::ConvectionMode::ConstantK;
  m.k2 = 0.0;
  EXPECT_THROW(m.validate(), bohmfol::InvalidModel);
}

TEST(WaveguideModel, ModeNamesRoundTrip) {
  for (auto z : {f::ZMode::HalfOscillator, f::ZMode::TruncatedGaussian}) {
    EXPECT_EQ(f::parse_z_mode(f::to_string(z)), z);
  }
  for (auto c : {f::ConvectionMode::ExactDND, f::ConvectionMode::ConstantK}) {
    EXPECT_EQ(f::parse_conv_mode(f::to_string(c)), c);
  }
  EXPECT_ANY_THROW(f::parse_z_mode("cubic"));
}

TEST(SpinAxis, RequiresUnitVector) {
  EXPECT_THROW(f::SpinAxis(Vec3{1, 1, 0}), bohmfol::DomainError);
  EXPECT_NO_THROW(f::SpinAxis(Vec3{0.6, 0.8, 0}));
  EXPECT_EQ(f::SpinAxis::along({0, 0, 3}), f::SpinAxis::Z());
}

TEST(InitialDensity, VanishesBehindWall) {
  const f::WaveguideModel m;
  EXPECT_EQ(f::initial_density(m, {0.3, -0.2, -0.5}), 0.0);
  f::WaveguideModel tg;
  tg.z_mode = f::ZMode::TruncatedGaussian;
  EXPECT_EQ(f::initial_density(tg, {0.0, 0.0, -0.5}), 0.0);
}

TEST(InitialDensity, MomentsByQuadrature) {
  f::WaveguideModel m;
  m.omega = 1.7;
  const double h = 1e-3;
  // The density factorizes, so line integrals through fixed points give the
  // marginal moments.
  double norm_z = 0.0, mean_z = 0.0;
  for (double z = 0.5 * h; z < 12.0; z += h) {
    const double r = f::initial_density(m, {0.0, 0.0, z});
    norm_z += r;
    mean_z += z * r;
  }
  EXPECT_NEAR(mean_z / norm_z, 2.0 / std::sqrt(kPi), 1e-6);
  double norm_x = 0.0, var_x = 0.0;
  for (double x = -10.0; x < 10.0; x += h) {
    const double r = f::initial_density(m, {x, 0.0, 1.0});
    norm_x += r;
    var_x += x * x * r;
  }
  EXPECT_NEAR(var_x / norm_x, 1.0 / (2.0 * m.omega), 1e-6);
  // Full normalization: transverse peak omega/pi times the z integral.
  EXPECT_NEAR(norm_z * h / (m.omega / kPi), 1.0, 1e-6);
}

TEST(InitialDensity, ZCdfMatchesQuadrature) {
  for (auto mode : {f::ZMode::HalfOscillator, f::ZMode::TruncatedGaussian}) {
    f::WaveguideModel m;
    m.z_mode = mode;
    const double h = 1e-4;
    double acc = 0.0;
    double z = 0.0;
    for (double target : {0.5, 1.0, 2.0}) {
      for (; z + h <= target + 1e-12; z += h) {
        acc += h * f::initial_density(m, {0, 0, z + 0.5 * h});
      }
      EXPECT_NEAR(acc / (m.omega / kPi), f::initial_z_cdf(m, target), 1e-7);
    }
  }
}

TEST(LogAmpGradients, Examples) {
  f::WaveguideModel m;
  EXPECT_EQ(f::log_amp_gradients(m, 0.0, 1.3, 0.4).d_rho, 0.0);
  EXPECT_DOUBLE_EQ(f::log_amp_gradients(m, 0.0, 1.0, 0.0).d_z, 0.0);
  m.z_mode = f::ZMode::TruncatedGaussian;
  EXPECT_DOUBLE_EQ(f::log_amp_gradients(m, 0.0, 1.0, 0.0).d_z, -1.0);
}

TEST(LogAmpGradients, MatchPacketFiniteDifferences) {
  const f::WaveguideModel m;
  const f::WaveguidePacket g(m);
  const double h = 1e-5;
  for (const Vec3 x : {Vec3{0.3, -0.4, 1.2}, Vec3{-1, 0.5, 2.5}}) {
    for (double t : {0.0, 0.7, 3.0}) {
      const Vec3 la = g.log_amplitude_gradient(x, t);
      const Vec3 ph = g.phase_gradient(x, t);
      const Vec3 ez{0, 0, h};
      const double dlog = (std::log(std::abs(g.value(x + ez, t))) -
                           std::log(std::abs(g.value(x - ez, t)))) /
                          (2 * h);
      const double dphase =
          std::arg(g.value(x + ez, t) / g.value(x - ez, t)) / (2 * h);
      EXPECT_NEAR(la.z, dlog, 1e-6);
      EXPECT_NEAR(ph.z, dphase, 1e-6);
      EXPECT_NEAR(ph.z, t * x.z / (1 + t * t), 1e-12);
    }
  }
}

TEST(ConvectiveVelocity, Examples) {
  f::WaveguideModel m;
  expect_vec_near(f::convective_velocity(m, {0.2, 0.1, 3.0}, 0.0), {}, 0.0);
  expect_vec_near(f::convective_velocity(m, {0.0, 0.0, 2.0}, 1.0), {0, 0, 1},
                  1e-15);
  m.conv_mode = f::ConvectionMode::ConstantK;
  m.k2 = 1.0;
  expect_vec_near(f::convective_velocity(m, {5, -2, 0.1}, 9.0), {0, 0, 1},
                  0.0);
}

TEST(ConditionalVelocity, Examples) {
  const f::WaveguideModel m;
  const Vec3 on_axis{0.0, 0.0, 1.7};
  expect_vec_near(f::conditional_velocity(m, f::SpinAxis::Z(),
                                          f::SpinOutcome::Up, on_axis, 0.8),
                  f::convective_velocity(m, on_axis, 0.8), 1e-15);
  expect_vec_near(f::conditional_velocity(m, f::SpinAxis::X(),
                                          f::SpinOutcome::Down,
                                          {0.7, 0.0, 1.0}, 0.0),
                  {}, 1e-15);
}

TEST(Weights, Examples) {
  auto w = f::weights(3.0, 1.0);
  EXPECT_DOUBLE_EQ(w.plus, 0.75);
  EXPECT_DOUBLE_EQ(w.minus, 0.25);
  w = f::weights(2.5, 0.0);
  EXPECT_EQ(w.plus, 1.0);
  EXPECT_EQ(w.minus, 0.0);
  w = f::weights(0.3, 0.3);
  EXPECT_EQ(w.plus, 0.5);
  EXPECT_EQ(w.minus, 0.5);
  EXPECT_THROW(f::weights(0.0, 0.0), bohmfol::BothZero);
}

TEST(Weights, SumToOneAndNonNegative) {
  std::mt19937_64 gen(3);
  std::exponential_distribution<double> ed(1.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = ed(gen) * std::pow(10.0, ed(gen) * 5 - 10);
    const double b = ed(gen);
    const auto w = f::weights(a, b);
    EXPECT_GE(w.plus, 0.0);
    EXPECT_GE(w.minus, 0.0);
    EXPECT_NEAR(w.plus + w.minus, 1.0, 1e-12);
  }
}

TEST(MixedVelocity, Examples) {
  const Vec3 vp{1, 2, 3}, vm{-4, 0.5, 2};
  expect_vec_near(f::mixed_velocity({1.0, 0.0}, vp, vm), vp, 0.0);
  const Vec3 conv{0, 0, 0.7}, spin{0.3, -0.2, 0.1};
  expect_vec_near(f::mixed_velocity({0.5, 0.5}, conv + spin, conv - spin),
                  conv, 1e-15);
  expect_vec_near(f::mixed_velocity({0.5, 0.5}, vp, vp), vp, 1e-15);
}

TEST(ScenarioVelocity, Examples) {
  const f::WaveguideModel m;
  const Vec3 x{0.4, -0.9, 2.2};
  expect_vec_near(f::scenario_velocity(m, f::BobFirst{}, x, 1.3),
                  f::convective_velocity(m, x, 1.3), 0.0);
  expect_vec_near(
      f::scenario_velocity(
          m, f::AliceFirst{f::SpinAxis::Z(), f::SpinOutcome::Up}, {0, 0, 2.2},
          1.3),
      f::convective_velocity(m, {0, 0, 2.2}, 1.3), 1e-15);
}

TEST(ScenarioVelocity, BobFirstIsPurelyAxial) {
  const f::WaveguideModel m;
  std::mt19937_64 gen(8);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 x{nd(gen), nd(gen), 0.01 + std::abs(3 * nd(gen))};
    const Vec3 v = f::scenario_velocity(m, f::BobFirst{}, x, std::abs(nd(gen)));
    EXPECT_EQ(v.x, 0.0);
    EXPECT_EQ(v.y, 0.0);
  }
}

TEST(ScenarioVelocity, LongitudinalFieldRotatesRigidly) {
  f::WaveguideModel m;
  m.omega = 1.3;
  std::mt19937_64 gen(9);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 x{nd(gen), nd(gen), 0.01 + std::abs(3 * nd(gen))};
    for (auto s : {f::SpinOutcome::Up, f::SpinOutcome::Down}) {
      const Vec3 v = f::scenario_velocity(m, f::AliceFirst{f::SpinAxis::Z(), s},
                                          x, std::abs(nd(gen)));
      const double rho2 = x.x * x.x + x.y * x.y;
      EXPECT_NEAR((x.x * v.x + x.y * v.y) / std::sqrt(rho2), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(x.x * v.y - x.y * v.x) / rho2, m.omega, 1e-12);
    }
  }
}

TEST(ScenarioVelocity, TransverseMirrorSymmetry) {
  const f::WaveguideModel m;
  std::mt19937_64 gen(10);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 x{nd(gen), nd(gen), 0.01 + std::abs(3 * nd(gen))};
    const Vec3 mirrored{x.x, -x.y, x.z};
    const double t = std::abs(2 * nd(gen));
    for (auto s : {f::SpinOutcome::Up, f::SpinOutcome::Down}) {
      const Vec3 a =
          f::scenario_velocity(m, f::AliceFirst{f::SpinAxis::X(), s}, x, t);
      const Vec3 b = f::scenario_velocity(
          m, f::AliceFirst{f::SpinAxis::X(), f::flipped(s)}, mirrored, t);
      EXPECT_NEAR(a.z, b.z, 1e-12);
      EXPECT_NEAR(a.y, -b.y, 1e-12);
      EXPECT_NEAR(a.x, b.x, 1e-12);
    }
  }
}

TEST(BackflowPredicate, Examples) {
  f::WaveguideModel m;
  m.conv_mode = f::ConvectionMode::ConstantK;
  m.k2 = 1.0;
  EXPECT_FALSE(f::backflow_predicate(m, f::SpinOutcome::Up, {0, 0, 1}, 0.0));
  EXPECT_TRUE(f::backflow_predicate(m, f::SpinOutcome::Up, {0, 2, 1}, 0.0));
  EXPECT_FALSE(f::backflow_predicate(m, f::SpinOutcome::Up, {0, -2, 1}, 0.0));
  // The predicate agrees with the sign of the axial field component.
  const Vec3 x{0.3, 2.0, 1.0};
  const Vec3 v = f::conditional_velocity(m, f::SpinAxis::X(),
                                         f::SpinOutcome::Up, x, 0.0);
  EXPECT_LT(v.z, 0.0);
  EXPECT_THROW(f::backflow_predicate(f::WaveguideModel{}, f::SpinOutcome::Up,
                                     x, 0.0),
               bohmfol::ModeError);
}

TEST(Particle1Velocity, Examples) {
  const PlaneWave pw({0.3, -0.1, 0.9});
  expect_vec_near(f::particle1_conditional_velocity(
                      pw, f::SpinAxis::X(), f::SpinOutcome::Up, {1, 2, 3}, 0.0),
                  {0.3, -0.1, 0.9}, 1e-15);

  const f::GaussianPacket g({0.1, 0.2, 1.0}, 0.7, {});
  const Vec3 x{0.5, -0.3, 1.4};
  const f::SpinAxis axis = f::SpinAxis::along({1, 2, -0.5});
  const Vec3 p1 = f::particle1_conditional_velocity(g, axis,
                                                    f::SpinOutcome::Up, x, 0.0);
  const Vec3 p2 = f::particle2_conditional_velocity(g, axis,
                                                    f::SpinOutcome::Up, x, 0.0);
  // Real packet: no phase gradient, so the two are pure spin terms.
  expect_vec_near(p1, -1.0 * p2, 1e-15);
  const Vec3 p1m = f::particle1_conditional_velocity(
      g, axis, f::SpinOutcome::Down, x, 0.0);
  expect_vec_near(p1, -1.0 * p1m, 1e-15);
  EXPECT_GT(p1.norm(), 0.1);
  EXPECT_THROW(f::particle1_conditional_velocity(Zero{}, axis,
                                                 f::SpinOutcome::Up, x, 0.0),
               bohmfol::ZeroAmplitude);
}

TEST(PauliCurrent, PlaneWaveSpinUp) {
  const double k = 1.0;
  const f::SpinorSampler psi = [&](const Vec3 &x) {
    return f::Spinor2{std::exp(cplx(0.0, k * x.z)), 0.0};
  };
  const Vec3 j = f::pauli_current_numeric(psi, {0.3, 0.2, 1.0}, 1e-4);
  expect_vec_near(j, {0, 0, 1}, 1e-8);
}

TEST(PauliCurrent, RealGaussianSpinFluxIsAnalyticCurl) {
  const double sigma = 0.8;
  const f::GaussianPacket g({}, sigma, {});
  const f::SpinorSampler psi = [&](const Vec3 &x) {
    return f::Spinor2{g.value(x, 0.0), 0.0};
  };
  std::mt19937_64 gen(4);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 50; ++i) {
    const Vec3 x{nd(gen), nd(gen), nd(gen)};
    const double r2 = std::norm(g.value(x, 0.0));
    // (1/2) curl(|psi|^2 z) with d_i |psi|^2 = -x_i / sigma^2 |psi|^2.
    const Vec3 expected =
        0.5 * r2 * Vec3{-x.y / (sigma * sigma), x.x / (sigma * sigma), 0.0};
    expect_vec_near(f::pauli_current_numeric(psi, x, 1e-4), expected, 1e-6);
  }
}

TEST(Singlet, DensityExamples) {
  auto one = std::make_shared<PlaneWave>(Vec3{});
  f::SingletState s{one, one, one, f::SpinAxis::Z()};
  EXPECT_DOUBLE_EQ(f::singlet_density(s, {}, {}, 0.0), 1.0);

  auto fp = std::make_shared<PlaneWave>(Vec3{0.1, 0, 0}, 0.6);
  auto g0 = std::make_shared<PlaneWave>(Vec3{0, 0, 1}, 1.5);
  f::SingletState single{fp, std::make_shared<Zero>(), g0, f::SpinAxis::X()};
  EXPECT_NEAR(f::singlet_density(single, {1, 2, 3}, {0, 0, 1}, 0.0),
              1.5 * 1.5 * 0.36 / 2.0, 1e-15);
}

TEST(Singlet, DensityIntegratesToOne) {
  auto fp = std::make_shared<f::GaussianPacket>(Vec3{-3, 0, 0}, 0.9,
                                                Vec3{0.2, 0, 0});
  auto fm = std::make_shared<f::GaussianPacket>(Vec3{-3, 1, 0}, 0.7,
                                                Vec3{0, 0.3, 0});
  auto g0 = std::make_shared<f::WaveguidePacket>(f::WaveguideModel{});
  const f::SingletState s{fp, fm, g0, f::SpinAxis::Z()};
  const Vec3 a1{-3, 0.3, 0}, a2{0, 0, 1};
  // rho is a product of a function of x1 and a function of x2, so
  // int rho = int rho(., a2) * int rho(a1, .) / rho(a1, a2).
  const double h = 0.1;
  double i1 = 0.0;
  for (double x = -9.0; x <= 3.0; x += h) {
    for (double y = -5.0; y <= 6.0; y += h) {
      for (double z = -5.0; z <= 5.0; z += h) {
        i1 += f::singlet_density(s, {x, y, z}, a2, 0.0);
      }
    }
  }
  double i2 = 0.0;
  for (double x = -5.0; x <= 5.0; x += h) {
    for (double y = -5.0; y <= 5.0; y += h) {
      for (double z = 0.5 * h; z <= 7.0; z += h) {
        i2 += f::singlet_density(s, a1, {x, y, z}, 0.0);
      }
    }
  }
  const double total =
      i1 * h * h * h * i2 * h * h * h / f::singlet_density(s, a1, a2, 0.0);
  EXPECT_NEAR(total, 1.0, 1e-3);
}

TEST(Singlet, ClosedCurrentExamples) {
  auto fp = std::make_shared<f::GaussianPacket>(Vec3{-3, 0, 0}, 1.0, Vec3{});
  auto g0 = std::make_shared<f::WaveguidePacket>(f::WaveguideModel{});
  const Vec3 x1{-2.5, 0.2, 0.1}, x2{0.4, 0.7, 1.6};
  const double t = 0.9;
  const f::SpinAxis axis = f::SpinAxis::X();

  f::SingletState single{fp, std::make_shared<Zero>(), g0, axis};
  const Vec3 j = f::singlet_current2_closed(single, x1, x2, t);
  const double rho = f::singlet_density(single, x1, x2, t);
  expect_vec_near(j / rho,
                  f::particle2_conditional_velocity(*g0, axis,
                                                    f::SpinOutcome::Up, x2, t),
                  1e-12);

  f::SingletState equal{fp, fp, g0, axis};
  const Vec3 je = f::singlet_current2_closed(equal, x1, x2, t);
  const double rhoe = f::singlet_density(equal, x1, x2, t);
  expect_vec_near(je / rhoe, g0->phase_gradient(x2, t), 1e-12);
}

TEST(Singlet, WeightedBranchFieldsEqualCurrentOverDensity) {
  auto fp = std::make_shared<f::GaussianPacket>(Vec3{-3, 0, 0}, 1.0,
                                                Vec3{-0.5, 0.2, 0});
  auto fm = std::make_shared<f::GaussianPacket>(Vec3{-3, 1, 0.5}, 0.8,
                                                Vec3{0.1, -0.4, 0.3});
  auto g0 = std::make_shared<f::WaveguidePacket>(f::WaveguideModel{});
  std::mt19937_64 gen(12);
  for (int i = 0; i < 100; ++i) {
    const auto c = random_config(gen);
    const double t = 0.5 * i / 100.0;
    const f::SingletState s{fp, fm, g0, c.axis};
    const auto w = f::weights(std::norm(fp->value(c.x1, t)),
                              std::norm(fm->value(c.x1, t)));
    const Vec3 mixed = f::mixed_velocity(
        w,
        f::particle2_conditional_velocity(*g0, c.axis, f::SpinOutcome::Up,
                                          c.x2, t),
        f::particle2_conditional_velocity(*g0, c.axis, f::SpinOutcome::Down,
                                          c.x2, t));
    const Vec3 ratio = f::singlet_current2_closed(s, c.x1, c.x2, t) /
                       f::singlet_density(s, c.x1, c.x2, t);
    expect_vec_near(mixed, ratio, 1e-10);
  }
}

TEST(Singlet, SpinorMatchesIndependentConstruction) {
  auto fp = std::make_shared<f::GaussianPacket>(Vec3{-3, 0, 0}, 1.0,
                                                Vec3{-0.5, 0.2, 0});
  auto fm = std::make_shared<f::GaussianPacket>(Vec3{-3, 1, 0.5}, 0.8,
                                                Vec3{0.1, -0.4, 0.3});
  auto g0 = std::make_shared<f::WaveguidePacket>(f::WaveguideModel{});
  std::mt19937_64 gen(13);
  for (int i = 0; i < 20; ++i) {
    const auto c = random_config(gen);
    const f::SingletState s{fp, fm, g0, c.axis};
    const auto a = s.value(c.x1, c.x2, 0.0);
    const auto b = singlet_value(*fp, *fm, *g0, c.axis.n(), c.x1, c.x2);
    // Equal up to a global phase: compare every bilinear a_i conj(a_j).
    for (int p = 0; p < 4; ++p) {
      for (int q = 0; q < 4; ++q) {
        const cplx u = a[p] * std::conj(a[q]);
        const cplx v = b[p] * std::conj(b[q]);
        EXPECT_NEAR(std::abs(u - v), 0.0, 1e-14);
      }
    }
  }
}

TEST(Singlet, NumericCurrentMatchesClosedForm) {
  auto fp = std::make_shared<f::GaussianPacket>(Vec3{-3, 0, 0}, 1.0,
                                                Vec3{-0.5, 0.2, 0});
  auto fm = std::make_shared<f::GaussianPacket>(Vec3{-3, 1, 0.5}, 0.8,
                                                Vec3{0.1, -0.4, 0.3});
  auto g0 = std::make_shared<f::WaveguidePacket>(f::WaveguideModel{});
  std::mt19937_64 gen(14);
  for (int i = 0; i < 100; ++i) {
    const auto c = random_config(gen);
    const f::SingletState s{fp, fm, g0, c.axis};
    const Vec3 closed = f::singlet_current2_closed(s, c.x1, c.x2, 0.0);
    const Vec3 ref =
        reference_current2(*fp, *fm, *g0, c.axis.n(), c.x1, c.x2, 1e-4);
    const f::PairSpinorSampler sampler = [&](const Vec3 &a, const Vec3 &b) {
      return s.value(a, b, 0.0);
    };
    const Vec3 lib = f::pauli_current_numeric(sampler, c.x1, c.x2, 2, 1e-4);
    const double scale = closed.norm();
    ASSERT_GT(scale, 0.0);
    EXPECT_LT((ref - closed).norm() / scale, 1e-5) << "config " << i;
    EXPECT_LT((lib - closed).norm() / scale, 1e-5) << "config " << i;
  }
}

TEST(Singlet, FlippedSpinFluxBreaksAgreement) {
  auto fp = std::make_shared<f::GaussianPacket>(Vec3{-3, 0, 0}, 1.0, Vec3{});
  auto fm = std::make_shared<f::GaussianPacket>(Vec3{-3, 1, 0.5}, 0.8, Vec3{});
  auto g0 = std::make_shared<f::WaveguidePacket>(f::WaveguideModel{});
  const f::SingletState s{fp, fm, g0, f::SpinAxis::X()};
  const Vec3 x1{-3.5, 0.1, 0}, x2{0.5, 0.8, 1.5};
  const f::PairSpinorSampler sampler = [&](const Vec3 &a, const Vec3 &b) {
    return s.value(a, b, 0.0);
  };
  const Vec3 closed = f::singlet_current2_closed(s, x1, x2, 0.0);
  const Vec3 bad = f::pauli_current_numeric(sampler, x1, x2, 2, 1e-4, -1.0);
  EXPECT_GT((bad - closed).norm() / closed.norm(), 1e-2);
}
