#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "bohmfol/ensemble.hpp"
#include "bohmfol/errors.hpp"
#include "oracles.hpp"

namespace en = bohmfol::ensemble;
namespace f = bohmfol::fields;
using bohmfol::Vec3;
using oracle::half_oscillator_cdf;
using oracle::pushforward_cdf;

namespace {

const double kPi = std::acos(-1.0);

// Coarser step for ensemble-level statistics; arrival times agree with the
// default step far below the KS resolution.
en::IntegratorConfig fast() {
  en::IntegratorConfig c;
  c.dt = 1e-2;
  return c;
}

en::ArrivalHistogram synthetic(const std::vector<double> &taus,
                               std::uint64_t no_arrival) {
  en::ArrivalHistogram h;
  h.raw_taus = taus;
  h.n_no_arrival = no_arrival;
  h.n_total = taus.size() + no_arrival;
  return h;
}

} // namespace

TEST(Rng, StreamsAreKeyedAndReproducible) {
  bohmfol::rng::Stream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  EXPECT_NE(c.uniform(), d.uniform());
  EXPECT_NE(bohmfol::rng::derive_seed(1, 2), bohmfol::rng::derive_seed(2, 1));
}

TEST(SampleInitial, HalfOscillatorMoments) {
  f::WaveguideModel m;
  m.omega = 2.0;
  bohmfol::rng::Stream rng(42, 0);
  const int n = 1000000;
  double sz = 0.0, sx = 0.0, sxx = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec3 x = en::sample_initial(m, rng);
    ASSERT_GT(x.z, 0.0);
    sz += x.z;
    sx += x.x;
    sxx += x.x * x.x;
  }
  const double mean_z = sz / n;
  const double var_z = 1.5 - 4.0 / kPi;
  EXPECT_NEAR(mean_z, 2.0 / std::sqrt(kPi), 3.0 * std::sqrt(var_z / n));
  const double var_x = sxx / n - (sx / n) * (sx / n);
  const double s2 = 1.0 / (2.0 * m.omega);
  EXPECT_NEAR(var_x, s2, 3.0 * s2 * std::sqrt(2.0 / n));
}

TEST(SampleInitial, ZMarginalMatchesCdf) {
  for (auto mode : {f::ZMode::HalfOscillator, f::ZMode::TruncatedGaussian}) {
    f::WaveguideModel m;
    m.z_mode = mode;
    bohmfol::rng::Stream rng(5, 1);
    std::vector<double> z(100000);
    for (auto &v : z) {
      v = en::sample_initial(m, rng).z;
    }
    std::sort(z.begin(), z.end());
    const auto cdf = mode == f::ZMode::HalfOscillator
                         ? std::function<double(double)>(half_oscillator_cdf)
                         : std::function<double(double)>(
                               [](double v) { return std::erf(v); });
    // One-sample KS at the 3 sigma level: about 1.73 / sqrt(n).
    EXPECT_LT(en::ks_statistic(z, cdf), 1.73 / std::sqrt(z.size()));
  }
}

TEST(SgOutcome, FairAndDeterministic) {
  bohmfol::rng::Stream a(99, 0), b(99, 0);
  const int n = 1000000;
  int up = 0;
  for (int i = 0; i < n; ++i) {
    const auto s = en::sg_outcome(a);
    EXPECT_EQ(s, en::sg_outcome(b));
    EXPECT_EQ(f::sign_of(s) * f::sign_of(s), 1.0);
    up += s == f::SpinOutcome::Up;
  }
  EXPECT_NEAR(static_cast<double>(up) / n, 0.5, 3.0 * 0.5 / std::sqrt(n));
}

TEST(ArrivalDistribution, LongitudinalMatchesPushforward) {
  const f::WaveguideModel m;
  const auto h = en::arrival_distribution(
      m, en::EnsembleScenario::alice_first(f::SpinAxis::Z()), 10000, 3, {});
  EXPECT_EQ(h.n_total, 10000u);
  const auto cdf = [&](double T) { return pushforward_cdf(m.L, T); };
  // Trajectories that never arrive count as tau = infinity.
  std::vector<double> taus = h.sorted_taus();
  taus.insert(taus.end(), h.n_no_arrival, std::numeric_limits<double>::infinity());
  EXPECT_LT(en::ks_statistic(taus, cdf), 0.02);
  EXPECT_LT(h.max_rho_drift, 1e-6);
  EXPECT_EQ(h.n_backflow, 0u);
}

TEST(ArrivalDistribution, LibraryPushforwardMatchesIndependentForm) {
  const f::WaveguideModel m;
  for (double T : {0.0, 0.5, 1.0, 3.0, 10.0, 40.0}) {
    EXPECT_NEAR(en::longitudinal_tau_cdf(m, T), pushforward_cdf(m.L, T), 1e-12);
  }
}

TEST(ArrivalDistribution, EmptyEnsembleRejected) {
  EXPECT_THROW(en::arrival_distribution({}, en::EnsembleScenario::bob_first(),
                                        0, 1, fast()),
               bohmfol::EmptyEnsemble);
}

TEST(ArrivalDistribution, HistogramConservation) {
  std::mt19937_64 gen(31);
  std::uniform_int_distribution<int> nd(1, 300), bd(1, 50);
  const std::array<en::EnsembleScenario, 3> scenarios{
      en::EnsembleScenario::alice_first(f::SpinAxis::X()),
      en::EnsembleScenario::alice_first(f::SpinAxis::Z()),
      en::EnsembleScenario::bob_first()};
  for (int i = 0; i < 15; ++i) {
    auto cfg = fast();
    cfg.t_max = i % 2 ? 50.0 : 8.0; // short horizons leave stragglers
    en::BinSpec bins;
    bins.count = static_cast<std::size_t>(bd(gen));
    bins.hi = i % 3 ? 0.0 : 6.0;
    const auto h = en::arrival_distribution({}, scenarios[i % 3],
                                            static_cast<std::size_t>(nd(gen)),
                                            i, cfg, bins);
    std::uint64_t sum = h.n_no_arrival;
    for (auto c : h.counts) {
      sum += c;
    }
    EXPECT_EQ(sum, h.n_total);
    ASSERT_EQ(h.bin_edges.size(), h.counts.size() + 1);
    for (std::size_t k = 1; k < h.bin_edges.size(); ++k) {
      EXPECT_LT(h.bin_edges[k - 1], h.bin_edges[k]);
    }
    EXPECT_EQ(h.raw_taus.size() + h.n_no_arrival, h.n_total);
  }
}

TEST(ArrivalDistribution, IndependentOfThreadCount) {
  const auto sc = en::EnsembleScenario::alice_first(f::SpinAxis::X());
  const auto a = en::arrival_distribution({}, sc, 500, 11, fast(), {}, 1);
  const auto b = en::arrival_distribution({}, sc, 500, 11, fast(), {}, 4);
  EXPECT_EQ(a.raw_taus, b.raw_taus);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.n_backflow, b.n_backflow);
}

TEST(ArrivalDistribution, TransverseShowsBackflow) {
  const auto h = en::arrival_distribution(
      {}, en::EnsembleScenario::alice_first(f::SpinAxis::X()), 2000, 4, fast());
  EXPECT_GT(h.backflow_fraction(), 0.01);
  EXPECT_EQ(h.n_no_arrival, 0u);
}

TEST(WriteCsv, Format) {
  en::ArrivalHistogram h;
  h.bin_edges = {0.0, 0.1, 1.0 / 3.0};
  h.counts = {4, 5};
  h.n_no_arrival = 2;
  h.n_total = 11;
  std::ostringstream os;
  en::write_csv(os, h);
  EXPECT_EQ(os.str(), "tau_lo,tau_hi,count\n"
                      "0,0.10000000000000001,4\n"
                      "0.10000000000000001,0.33333333333333331,5\n"
                      "no_arrival,,2\n");
}

TEST(EmpiricalTauMax, Examples) {
  EXPECT_EQ(en::empirical_tau_max(synthetic({3.1}, 0)), 3.1);
  EXPECT_EQ(en::empirical_tau_max(synthetic({1.0, 4.5, 2.0}, 3)), 4.5);
  EXPECT_THROW(en::empirical_tau_max(synthetic({}, 5)), bohmfol::NoArrivals);
}

TEST(EmpiricalTauMax, BoundedForTransverseUnboundedForLongitudinal) {
  const auto x = en::EnsembleScenario::alice_first(f::SpinAxis::X());
  const double t1 =
      en::empirical_tau_max(en::arrival_distribution({}, x, 5000, 6, fast()));
  const double t2 =
      en::empirical_tau_max(en::arrival_distribution({}, x, 10000, 6, fast()));
  EXPECT_LT(std::abs(t2 - t1) / t1, 0.02);

  const auto z = en::EnsembleScenario::alice_first(f::SpinAxis::Z());
  const double l1 =
      en::empirical_tau_max(en::arrival_distribution({}, z, 1000, 6, fast()));
  const double l2 =
      en::empirical_tau_max(en::arrival_distribution({}, z, 10000, 6, fast()));
  EXPECT_GT(l2, l1);
  EXPECT_GT(l2, 1.5 * t2);
}

TEST(TailMass, CountsLateAndMissing) {
  const auto h = synthetic({1.0, 2.0, 5.0, 7.0}, 1);
  EXPECT_DOUBLE_EQ(en::tail_mass(h, 4.0), 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(en::tail_mass(h, 10.0), 1.0 / 5.0);
}

TEST(Classify, Examples) {
  en::ClassifierConfig c;
  c.tau_c = 10.0;
  c.theta = 0.01;
  c.n_min = 100;
  std::vector<double> early(1000, 3.0);
  EXPECT_EQ(en::classify(synthetic(early, 0), c), en::DistributionClass::Exotic);
  std::vector<double> mixed(900, 3.0);
  mixed.insert(mixed.end(), 100, 12.0);
  EXPECT_EQ(en::classify(synthetic(mixed, 0), c),
            en::DistributionClass::HeavyTailed);
  // Between theta / 10 and theta.
  std::vector<double> band(995, 3.0);
  band.insert(band.end(), 5, 12.0);
  EXPECT_EQ(en::classify(synthetic(band, 0), c),
            en::DistributionClass::Indeterminate);
  EXPECT_THROW(en::classify(synthetic(std::vector<double>(99, 1.0), 0), c),
               bohmfol::TooFewSamples);
}

TEST(ClassifierConfig, Validation) {
  en::ClassifierConfig c;
  EXPECT_NO_THROW(c.validate());
  c.tau_c = 0.0;
  EXPECT_THROW(c.validate(), bohmfol::InvalidClassifier);
  c = {};
  c.theta = 1.0;
  EXPECT_THROW(c.validate(), bohmfol::InvalidClassifier);
}

TEST(Calibrate, DefaultModelSeparates) {
  const auto a = en::calibrate({}, fast(), 10000, 77, 0.003);
  EXPECT_TRUE(std::isfinite(a.classifier.tau_c));
  EXPECT_NEAR(a.classifier.tau_c, 1.1 * a.transverse_tau_max, 1e-12);
  EXPECT_GE(a.longitudinal_tail, 5.0 * 0.003);
  const auto b = en::calibrate_classifier({}, fast(), 10000, 77, 0.003);
  EXPECT_EQ(a.classifier.tau_c, b.tau_c);
}

TEST(Calibrate, Failures) {
  EXPECT_THROW(en::calibrate_classifier({}, fast(), 2000, 1, 0.5),
               bohmfol::InsufficientSeparation);
  EXPECT_THROW(en::calibrate_classifier({}, fast(), 500, 1, 0.003),
               bohmfol::TooFewSamples);
}

TEST(KsStatistic, Examples) {
  const std::vector<double> a{0.1, 0.4, 0.5, 0.9};
  EXPECT_EQ(en::ks_statistic(a, a), 0.0);
  EXPECT_EQ(en::ks_statistic(a, std::vector<double>{1.5, 2.0, 3.0}), 1.0);
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd;
  std::vector<double> x(10000), y(10000);
  for (auto &v : x) {
    v = nd(gen);
  }
  for (auto &v : y) {
    v = nd(gen);
  }
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  EXPECT_LT(en::ks_statistic(x, y), 0.03);
  EXPECT_THROW(en::ks_statistic(std::vector<double>{}, a), bohmfol::EmptySample);
}

TEST(KsStatistic, AgainstCdf) {
  // Uniform grid midpoints against the uniform CDF: distance 1 / (2n).
  std::vector<double> u(100);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = (i + 0.5) / u.size();
  }
  const auto cdf = [](double v) { return std::clamp(v, 0.0, 1.0); };
  EXPECT_NEAR(en::ks_statistic(u, cdf), 0.005, 1e-12);
}

TEST(KsCritical, ScalesWithSampleSizes) {
  const double c = en::ks_critical(10000, 10000);
  EXPECT_GT(c, 0.02);
  EXPECT_LT(c, 0.03);
  EXPECT_NEAR(en::ks_critical(40000, 40000), c / 2.0, 1e-12);
}

TEST(EquivarianceCheck, Examples) {
  EXPECT_LT(en::equivariance_check({}, 0.0, 10000, 1), 0.02);
  EXPECT_LT(en::equivariance_check({}, 2.0, 10000, 2), 0.02);
  EXPECT_LT(en::equivariance_check({}, 2.0, 100, 3), 0.15);
}

TEST(FlashEta, Examples) {
  EXPECT_EQ(en::flash_eta(2500, 2500, 5000, 0), 0.0);
  EXPECT_EQ(en::flash_eta(5000, 0, 2500, 2500), 1.0);
  EXPECT_EQ(en::flash_eta(2500, 2500, 2500, 2500), 0.5);
  EXPECT_THROW(en::flash_eta(0, 0, 1, 1), bohmfol::EmptyChannelPair);
}

TEST(EnsembleProperties, OutcomeSignIndependence) {
  const auto up = en::arrival_distribution(
      {}, en::EnsembleScenario::alice_first(f::SpinAxis::X(), f::SpinOutcome::Up),
      10000, 101, fast());
  const auto down = en::arrival_distribution(
      {},
      en::EnsembleScenario::alice_first(f::SpinAxis::X(), f::SpinOutcome::Down),
      10000, 202, fast());
  EXPECT_LT(en::ks_statistic(up.sorted_taus(), down.sorted_taus()),
            en::ks_critical(10000, 10000));
}

TEST(EnsembleProperties, BobFirstMatchesLongitudinal) {
  const auto bob = en::arrival_distribution(
      {}, en::EnsembleScenario::bob_first(), 10000, 303, fast());
  const auto z = en::arrival_distribution(
      {}, en::EnsembleScenario::alice_first(f::SpinAxis::Z()), 10000, 404,
      fast());
  auto a = bob.sorted_taus();
  auto b = z.sorted_taus();
  a.insert(a.end(), bob.n_no_arrival, std::numeric_limits<double>::infinity());
  b.insert(b.end(), z.n_no_arrival, std::numeric_limits<double>::infinity());
  EXPECT_LT(en::ks_statistic(a, b), en::ks_critical(a.size(), b.size()));
}
