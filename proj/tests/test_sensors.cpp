#include <gtest/gtest.h>

#include "liese/sensors.hpp"

using namespace liese;

namespace {

ImuNoiseParams gauss_markov() {
  ImuNoiseParams p;
  p.sigma_g = 1e-3;
  p.sigma_a = 2e-2;
  p.sigma_bg = 1e-5;
  p.sigma_ba = 3e-4;
  p.tau_g = 100.0;
  p.tau_a = 250.0;
  return p;
}

}  // namespace

TEST(BiasDerivative, RandomConstantIsZero) {
  ImuNoiseParams p = gauss_markov();
  p.bias_model = BiasModel::RandomConstant;
  const ImuBiasState d = bias_derivative(ImuBiasState{Vec3(1, 2, 3), Vec3(4, 5, 6)}, p);
  EXPECT_EQ(d.b_g, Vec3::Zero());
  EXPECT_EQ(d.b_a, Vec3::Zero());
}

TEST(BiasDerivative, GaussMarkovScaling) {
  const ImuNoiseParams p = gauss_markov();
  const ImuBiasState d = bias_derivative(ImuBiasState{Vec3(p.tau_g, 0, 0), Vec3::Zero()}, p);
  EXPECT_EQ(d.b_g, Vec3(-1, 0, 0));
}

TEST(BiasDerivative, LongCorrelationApproachesRandomConstant) {
  ImuNoiseParams p = gauss_markov();
  p.tau_g = p.tau_a = 1e12;
  const ImuBiasState d = bias_derivative(ImuBiasState{Vec3(1, -2, 3), Vec3(4, 5, -6)}, p);
  EXPECT_LE(d.b_g.norm() + d.b_a.norm(), 1e-9);
}

TEST(DiscretizeBias, ZeroStep) {
  const BiasDiscretization d = discretize_bias(gauss_markov(), 0.0);
  EXPECT_EQ(d.phi_g, 1.0);
  EXPECT_EQ(d.q_g, 0.0);
  EXPECT_EQ(d.phi_a, 1.0);
  EXPECT_EQ(d.q_a, 0.0);
}

TEST(DiscretizeBias, GaussMarkovStationaryVariance) {
  const ImuNoiseParams p = gauss_markov();
  const double dt = 1.0;
  const BiasDiscretization d = discretize_bias(p, dt);
  double v = 0.0;
  const int steps = static_cast<int>(50.0 * p.tau_g / dt);
  for (int k = 0; k < steps; ++k) v = d.phi_g * d.phi_g * v + d.q_g;
  const double expected = p.sigma_bg * p.sigma_bg * p.tau_g / 2.0;
  EXPECT_NEAR(v, expected, 1e-3 * expected);
}

TEST(DiscretizeBias, RandomConstantGrowsLinearly) {
  ImuNoiseParams p = gauss_markov();
  p.bias_model = BiasModel::RandomConstant;
  const double dt = 0.01;
  const BiasDiscretization d = discretize_bias(p, dt);
  EXPECT_EQ(d.phi_a, 1.0);
  double v = 0.0;
  for (int k = 0; k < 1000; ++k) v = d.phi_a * d.phi_a * v + d.q_a;
  EXPECT_NEAR(v, 1000 * p.sigma_ba * p.sigma_ba * dt, 1e-12 * v);
}

TEST(Corrupt, NoBiasNoNoiseIsIdentity) {
  std::mt19937_64 rng(1);
  const ImuSample u{0.3, Vec3(0.1, 0.2, 0.3), Vec3(1, 2, 3)};
  const ImuSample out = corrupt(u, ImuBiasState{}, ImuNoiseParams{}, 0.01, rng);
  EXPECT_EQ(out.omega_ib_b, u.omega_ib_b);
  EXPECT_EQ(out.f_ib_b, u.f_ib_b);
  EXPECT_EQ(out.t, u.t);
}

TEST(Corrupt, BiasOnlyAddsConstantOffset) {
  std::mt19937_64 rng(2);
  const ImuBiasState b{Vec3(1e-3, -2e-3, 3e-3), Vec3(0.1, 0.2, -0.3)};
  for (int i = 0; i < 10; ++i) {
    const ImuSample out = corrupt(ImuSample{}, b, ImuNoiseParams{}, 0.01, rng);
    EXPECT_EQ(out.omega_ib_b, b.b_g);
    EXPECT_EQ(out.f_ib_b, b.b_a);
  }
}

TEST(Corrupt, WhiteNoiseDensity) {
  std::mt19937_64 rng(3);
  const ImuNoiseParams p = gauss_markov();
  const double dt = 0.005;
  constexpr int N = 100000;
  const ImuBiasState b{Vec3(1e-4, 0, 0), Vec3(0, 0.01, 0)};
  Vec3 sg = Vec3::Zero(), sa = Vec3::Zero();
  for (int i = 0; i < N; ++i) {
    const ImuSample out = corrupt(ImuSample{}, b, p, dt, rng);
    sg += ((out.omega_ib_b - b.b_g) * std::sqrt(dt)).cwiseAbs2();
    sa += ((out.f_ib_b - b.b_a) * std::sqrt(dt)).cwiseAbs2();
  }
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(sg(k) / N, p.sigma_g * p.sigma_g, 0.05 * p.sigma_g * p.sigma_g);
    EXPECT_NEAR(sa(k) / N, p.sigma_a * p.sigma_a, 0.05 * p.sigma_a * p.sigma_a);
  }
}

TEST(SampleBias, DeterministicForSeed) {
  const ImuNoiseParams p = gauss_markov();
  std::mt19937_64 a(42), b(42);
  ImuBiasState x, y;
  for (int i = 0; i < 100; ++i) {
    x = sample_bias_step(x, p, 0.01, a);
    y = sample_bias_step(y, p, 0.01, b);
  }
  EXPECT_EQ(x.b_g, y.b_g);
  EXPECT_EQ(x.b_a, y.b_a);
}

TEST(SampleBias, StepVarianceMatchesDiscretization) {
  const ImuNoiseParams p = gauss_markov();
  const double dt = 2.0;
  const BiasDiscretization d = discretize_bias(p, dt);
  std::mt19937_64 rng(4);
  constexpr int N = 50000;
  const ImuBiasState b0{Vec3(1e-4, 0, 0), Vec3(0, 1e-2, 0)};
  double s = 0.0;
  for (int i = 0; i < N; ++i) {
    const ImuBiasState b = sample_bias_step(b0, p, dt, rng);
    s += (b.b_g - d.phi_g * b0.b_g).squaredNorm() / 3.0;
  }
  EXPECT_NEAR(s / N, d.q_g, 0.05 * d.q_g);
}
