/**
 * @file  simulator.hpp
 * @brief Analytic truth trajectories, IMU synthesis by inverting the NED
 *        mechanization, and GNSS fix sampling.
 *
 * Trajectories are defined in the tangent plane at the origin and mapped to
 * ECEF exactly. The body is level with its x axis along the horizontal
 * velocity (north for Stationary).
 */
#pragma once

#include <random>
#include <vector>

#include "liese/errormodels.hpp"

namespace liese {

enum class TrajectoryKind { Stationary, StraightConstV, Circle, FigureEight };

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::Circle;
  double radius = 100.0;    ///< Circle radius [m]
  double speed = 10.0;      ///< Circle and StraightConstV speed [m/s]
  double heading = 0.0;     ///< StraightConstV course from north [rad]
  double scale = 100.0;     ///< FigureEight half-width [m]
  double period = 60.0;     ///< FigureEight period [s]
  Geodetic origin{0.5, 0.2, 100.0};
  double duration = 60.0;   ///< [s]
  double imu_dt = 0.005;    ///< [s]
  double gnss_dt = 1.0;     ///< [s], integer multiple of imu_dt
};

/// Throws ConfigError when the trajectory description violates its invariants.
void validate(const TrajectorySpec& spec);

/// Number of IMU intervals in the spec.
std::size_t imu_steps(const TrajectorySpec& spec);
/// Number of IMU intervals between GNSS fixes.
std::size_t gnss_stride(const TrajectorySpec& spec);

struct TruthSample {
  double t = 0.0;
  NavStateNED state;
};

/// Analytic state at time t.
NavStateNED truth_at(const TrajectorySpec& spec, double t, const EarthModel& E);

/// Exact rates (omega_ib^b, f_ib^b) at time t.
ImuSample true_imu_at(const TrajectorySpec& spec, double t,
                      const EarthModel& E);

/// Truth at t_k = k imu_dt for k = 0 .. imu_steps.
std::vector<TruthSample> generate_truth(const TrajectorySpec& spec,
                                        const EarthModel& E);

/// One sample per interval [t_k, t_k + imu_dt), holding the interval mean
/// of the exact rates (three-point Gauss-Legendre).
std::vector<ImuSample> synthesize_imu(const TrajectorySpec& spec,
                                      const EarthModel& E);

/// Fixes at every gnss_stride-th truth epoch after t = 0:
/// pos = r + C_b^e l + n, n ~ N(0, R).
std::vector<GnssFix> sample_gnss(const std::vector<TruthSample>& truth,
                                 const Vec3& lever_arm_b, const Mat3& R_e,
                                 std::size_t stride, std::mt19937_64& rng,
                                 const EarthModel& E);

}  // namespace liese
