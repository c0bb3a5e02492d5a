/**
 * @file  mechanization.hpp
 * @brief Continuous-time strapdown kinematics in NED and ECEF form and a
 *        fixed-step integrator with piecewise-constant IMU rates.
 */
#pragma once

#include <vector>

#include "liese/earth.hpp"

namespace liese {

/// IMU rate sample valid over [t, t + dt).
struct ImuSample {
  double t = 0.0;
  Vec3 omega_ib_b = Vec3::Zero();  ///< angular rate [rad/s]
  Vec3 f_ib_b = Vec3::Zero();      ///< specific force [m/s^2]
};

/// NED navigation state: attitude C_b^n, earth-relative velocity in n, position.
struct NavStateNED {
  Mat3 C_b_n = Mat3::Identity();
  Vec3 v_eb_n = Vec3::Zero();
  Geodetic geo;
};

/// Velocity stored in an ECEF state.
enum class VelocityConvention {
  EarthRelative,  ///< v_eb^e
  Inertial,       ///< v_ib^e = v_eb^e + omega_ie x r
  Auxiliary,      ///< vbar_eb^e = v_eb^e + omega_ie x r
};

/// ECEF navigation state.
struct NavStateECEF {
  Mat3 C_b_e = Mat3::Identity();
  Vec3 v = Vec3::Zero();
  Vec3 r = Vec3::Zero();
  VelocityConvention convention = VelocityConvention::EarthRelative;
};

/// NED state carrying the auxiliary velocity vbar = v + omega_ie^n x r_eb^n.
struct NavStateNEDAux {
  Mat3 C_b_n = Mat3::Identity();
  Vec3 vbar_n = Vec3::Zero();
  Geodetic geo;
};

struct NedDerivative {
  Mat3 dC;
  Vec3 dv;
  Vec3 dgeo;  ///< (dlat, dlon, dh)
};

struct EcefDerivative {
  Mat3 dC;
  Vec3 dv;
  Vec3 dr;
};

struct NedAuxDerivative {
  Mat3 dC;
  Vec3 dvbar;
  Vec3 dr;  ///< derivative of r_eb^n
};

/// NED mechanization. Throws PoleSingularity.
NedDerivative ned_derivative(const NavStateNED& s, const ImuSample& imu,
                             const EarthModel& E);

/// ECEF mechanization for every velocity convention.
EcefDerivative ecef_derivative(const NavStateECEF& s, const ImuSample& imu,
                               const EarthModel& E);

/// NED mechanization in auxiliary-velocity form with r = r_eb^n.
NedAuxDerivative ned_auxiliary_derivative(const NavStateNEDAux& s,
                                          const ImuSample& imu,
                                          const EarthModel& E);

/// Converts between ECEF velocity conventions.
NavStateECEF convert(const NavStateECEF& s, VelocityConvention to,
                     const EarthModel& E);
NavStateECEF to_ecef(const NavStateNED& s, const EarthModel& E,
                     VelocityConvention conv = VelocityConvention::EarthRelative);
NavStateNED to_ned(const NavStateECEF& s, const EarthModel& E);
NavStateNEDAux to_auxiliary(const NavStateNED& s, const EarthModel& E);
NavStateNED from_auxiliary(const NavStateNEDAux& s, const EarthModel& E);

enum class IntegrationMethod { RK4, Euler };

/// Rotations are re-orthonormalized when |C^T C - I| exceeds this.
inline constexpr double kOrthoTolerance = 1e-9;
/// ... and unconditionally every this many integrator steps.
inline constexpr int kOrthoPeriod = 100;

/// One step with the IMU sample held constant over dt.
NavStateNED step(const NavStateNED& s, const ImuSample& imu, double dt,
                 IntegrationMethod method, const EarthModel& E);
NavStateECEF step(const NavStateECEF& s, const ImuSample& imu, double dt,
                  IntegrationMethod method, const EarthModel& E);

/**
 * Integrates over an IMU stream with uniform step dt. Returns the initial
 * state followed by the state after every sample. Throws NonMonotoneTime if
 * the sample times do not strictly increase.
 */
std::vector<NavStateNED> integrate(const NavStateNED& s0,
                                   const std::vector<ImuSample>& imu, double dt,
                                   IntegrationMethod method,
                                   const EarthModel& E);
std::vector<NavStateECEF> integrate(const NavStateECEF& s0,
                                    const std::vector<ImuSample>& imu,
                                    double dt, IntegrationMethod method,
                                    const EarthModel& E);

}  // namespace liese
