/**
 * @file  filter.hpp
 * @brief Error-state EKF on SE_2(3): discretization, prediction, GNSS update
 *        and closed-loop correction by group retraction.
 */
#pragma once

#include "liese/errormodels.hpp"

namespace liese {

/// Chi-square 0.999 quantile with three degrees of freedom.
inline constexpr double kChi2Gate3 = 16.266236196238129;

struct FilterState {
  FullState nominal;
  Mat15 P = Mat15::Identity();
  Variant variant;
  double t = 0.0;
};

/// Static configuration shared by predict and update.
struct FilterModel {
  ImuNoiseParams noise;
  EarthModel earth = EarthModel::wgs84();
  IntegrationMethod method = IntegrationMethod::RK4;
  bool gating = false;
};

struct Discretization {
  Mat15 Phi;
  Mat15 Qd;
};

/// Second-order Taylor transition and trapezoidal process noise.
Discretization discretize(const Mat15& F, const Mat15x12& G, const Mat12& Qc,
                          double dt);

/// Advances the nominal by one IMU interval and propagates P. The transition
/// matrix used is written to Phi_out when given.
FilterState predict(const FilterState& fs, const ImuSample& imu, double dt,
                    const FilterModel& model, Mat15* Phi_out = nullptr);

struct UpdateReport {
  Vec3 z = Vec3::Zero();
  Mat3 S = Mat3::Identity();
  Mat15x3 K = Mat15x3::Zero();
  double nis = 0.0;
  Vec15 dx = Vec15::Zero();
};

/**
 * GNSS update with Joseph-form covariance and closed-loop correction.
 * Throws IncompatibleMode, InnovationGateExceeded (when gating is enabled).
 */
FilterState update(const FilterState& fs, const GnssFix& fix, UpdateMode mode,
                   const FilterModel& model, UpdateReport* report = nullptr);

/// Symmetric part of a square matrix.
template <class M>
M symmetrize(const M& A) {
  return 0.5 * (A + A.transpose());
}

}  // namespace liese
