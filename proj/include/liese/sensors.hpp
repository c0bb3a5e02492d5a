/**
 * @file  sensors.hpp
 * @brief IMU bias processes (first-order Gauss-Markov or random constant)
 *        and corruption of true IMU rates with bias and white noise.
 */
#pragma once

#include <random>

#include "liese/mechanization.hpp"

namespace liese {

enum class BiasModel { GaussMarkov, RandomConstant };

/// Noise densities. White-noise densities are continuous PSD square roots.
struct ImuNoiseParams {
  double sigma_g = 0.0;   ///< gyro white noise [rad/s/sqrt(Hz)]
  double sigma_a = 0.0;   ///< accel white noise [m/s^2/sqrt(Hz)]
  double sigma_bg = 0.0;  ///< gyro bias driving noise [rad/s/sqrt(s)]
  double sigma_ba = 0.0;  ///< accel bias driving noise [m/s^2/sqrt(s)]
  double tau_g = 3600.0;  ///< gyro bias correlation time [s]
  double tau_a = 3600.0;  ///< accel bias correlation time [s]
  BiasModel bias_model = BiasModel::GaussMarkov;
};

struct ImuBiasState {
  Vec3 b_g = Vec3::Zero();  ///< [rad/s]
  Vec3 b_a = Vec3::Zero();  ///< [m/s^2]
};

/// Deterministic part of the bias dynamics.
ImuBiasState bias_derivative(const ImuBiasState& b, const ImuNoiseParams& p);

/// Per-axis scalar transition and driving-noise variance over dt.
struct BiasDiscretization {
  double phi_g, q_g;
  double phi_a, q_a;
};

/// Exact discretization of the bias SDE.
BiasDiscretization discretize_bias(const ImuNoiseParams& p, double dt);

/// Propagates the bias mean over dt (no noise).
ImuBiasState propagate_bias_mean(const ImuBiasState& b, const ImuNoiseParams& p,
                                 double dt);

/// Samples the bias process over dt.
ImuBiasState sample_bias_step(const ImuBiasState& b, const ImuNoiseParams& p,
                              double dt, std::mt19937_64& rng);

/**
 * Corrupts a true IMU sample: omega + b_g + sigma_g / sqrt(dt) n and
 * f + b_a + sigma_a / sqrt(dt) n with n ~ N(0, I).
 */
ImuSample corrupt(const ImuSample& imu_true, const ImuBiasState& b,
                  const ImuNoiseParams& p, double dt, std::mt19937_64& rng);

}  // namespace liese
