/**
 * @file  sensors.cpp
 * @brief IMU bias processes and measurement corruption.
 */
#include "liese/sensors.hpp"

#include <cmath>

namespace liese {

namespace {

Vec3 normal3(std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Vec3 z;
  for (int i = 0; i < 3; ++i) z(i) = n01(rng);
  return z;
}

void scalar_discretization(const ImuNoiseParams& p, double sigma, double tau,
                           double dt, double& phi, double& q) {
  if (p.bias_model == BiasModel::RandomConstant) {
    phi = 1.0;
    q = sigma * sigma * dt;
    return;
  }
  phi = std::exp(-dt / tau);
  q = sigma * sigma * tau / 2.0 * (1.0 - std::exp(-2.0 * dt / tau));
}

}  // namespace

ImuBiasState bias_derivative(const ImuBiasState& b, const ImuNoiseParams& p) {
  if (p.bias_model == BiasModel::RandomConstant) return ImuBiasState{};
  return ImuBiasState{-b.b_g / p.tau_g, -b.b_a / p.tau_a};
}

BiasDiscretization discretize_bias(const ImuNoiseParams& p, double dt) {
  BiasDiscretization d;
  scalar_discretization(p, p.sigma_bg, p.tau_g, dt, d.phi_g, d.q_g);
  scalar_discretization(p, p.sigma_ba, p.tau_a, dt, d.phi_a, d.q_a);
  return d;
}

ImuBiasState propagate_bias_mean(const ImuBiasState& b, const ImuNoiseParams& p,
                                 double dt) {
  const BiasDiscretization d = discretize_bias(p, dt);
  return ImuBiasState{d.phi_g * b.b_g, d.phi_a * b.b_a};
}

ImuBiasState sample_bias_step(const ImuBiasState& b, const ImuNoiseParams& p,
                              double dt, std::mt19937_64& rng) {
  const BiasDiscretization d = discretize_bias(p, dt);
  const Vec3 ng = normal3(rng);
  const Vec3 na = normal3(rng);
  return ImuBiasState{d.phi_g * b.b_g + std::sqrt(d.q_g) * ng,
                      d.phi_a * b.b_a + std::sqrt(d.q_a) * na};
}

ImuSample corrupt(const ImuSample& imu_true, const ImuBiasState& b,
                  const ImuNoiseParams& p, double dt, std::mt19937_64& rng) {
  const Vec3 ng = normal3(rng);
  const Vec3 na = normal3(rng);
  const double s = 1.0 / std::sqrt(dt);
  ImuSample out = imu_true;
  out.omega_ib_b += b.b_g + p.sigma_g * s * ng;
  out.f_ib_b += b.b_a + p.sigma_a * s * na;
  return out;
}

}  // namespace liese
