/**
 * @file  earth.hpp
 * @brief WGS-84 ellipsoid, normal gravity, frame conversions, transport rates
 *        and the perturbation matrices of the earth and transport rates.
 *
 * Frames: e is ECEF, n is the local-level North-East-Down frame attached to
 * the body position. Vectors named *_n are resolved in n, *_e in e.
 */
#pragma once

#include "liese/liegroup.hpp"

namespace liese {

/// Ellipsoid and rotation constants. The two switches are test hooks.
struct EarthModel {
  double a = 6378137.0;                ///< semi-major axis [m]
  double e2 = 6.69437999014e-3;        ///< first eccentricity squared [-]
  double omega_ie = 7.2921151467e-5;   ///< earth rotation rate [rad/s]
  double mu = 3.986004418e14;          ///< gravitational constant GM [m^3/s^2]
  double gamma_e = 9.7803253359;       ///< normal gravity at the equator [m/s^2]
  double somigliana_k = 0.00193185265241;  ///< Somigliana constant [-]
  double free_air = 3.086e-6;          ///< free-air gradient [1/s^2]
  bool gravity_enabled = true;         ///< test hook: false gives g = 0

  static EarthModel wgs84() { return EarthModel{}; }
  /// Earth rotation vector resolved in e.
  Vec3 omega_ie_e() const { return Vec3(0.0, 0.0, omega_ie); }
};

/// Geodetic coordinates: latitude [rad], longitude [rad], ellipsoidal height [m].
struct Geodetic {
  double lat = 0.0;
  double lon = 0.0;
  double h = 0.0;

  Vec3 vec() const { return Vec3(lat, lon, h); }
  static Geodetic from(const Vec3& x) { return Geodetic{x(0), x(1), x(2)}; }
};

/// Meridian and prime-vertical radii of curvature [m].
struct Radii {
  double R_M;
  double R_N;
};

/// Latitudes closer to the pole than this raise PoleSingularity.
inline constexpr double kPoleGuard = 1e-6;

Radii radii(const EarthModel& E, double lat);

struct TransportRates {
  Vec3 omega_ie_n;
  Vec3 omega_en_n;
  Vec3 omega_in_n;
};

/// Earth rate and transport rate in n. Throws PoleSingularity near the poles.
TransportRates transport_rates(const EarthModel& E, const Geodetic& geo,
                               const Vec3& v_n);

/// Earth rate resolved in n (no pole restriction).
Vec3 omega_ie_n(const EarthModel& E, double lat);

/// Normal gravity magnitude (Somigliana plus linear free-air term) [m/s^2].
double gravity_magnitude(const EarthModel& E, const Geodetic& geo);

/// Plumb-bob gravity (0, 0, g_D) in n.
Vec3 gravity_n(const EarthModel& E, const Geodetic& geo);

/// Gravitation G = g + (omega_ie x)^2 r_eb, resolved in n.
Vec3 gravitation_n(const EarthModel& E, const Geodetic& geo);

/// Plumb-bob gravity resolved in e at ECEF position r_e.
Vec3 gravity_e(const EarthModel& E, const Vec3& r_e);

/// Gravitation resolved in e at ECEF position r_e.
Vec3 gravitation_e(const EarthModel& E, const Vec3& r_e);

/**
 * Exact gradient of the plumb-bob gravity field, dg_n / d(delta r_n), where
 * delta r_n is a displacement resolved in the n frame at geo and the field
 * is resolved in those fixed axes. Includes the tilt of the local vertical.
 */
Mat3 gravity_gradient_n(const EarthModel& E, const Geodetic& geo);

/// Exact gradient of gravity_e with respect to r_e.
Mat3 gravity_gradient_e(const EarthModel& E, const Vec3& r_e);

/// Simplified inverse-square perturbation (0, 0, 2 g / (sqrt(R_M R_N) + h) dr_D).
Vec3 gravity_perturbation_n(const EarthModel& E, const Geodetic& geo,
                            double delta_r_D);

/// Simplified ECEF perturbation -(mu / |r|^3) dr.
Vec3 gravity_perturbation_e(const EarthModel& E, const Vec3& r_e,
                            const Vec3& delta_r_e);

/**
 * Perturbation matrices of the earth and transport rates with respect to an
 * NED position displacement delta_r (north, east, down) and velocity error:
 *   delta omega_ie_n = M1 delta_r
 *   delta omega_en_n = M2 delta_v + M3 delta_r
 * using delta lat = dr_N / (R_M + h) and delta h = -dr_D.
 * Throws PoleSingularity.
 */
struct MMatrices {
  Mat3 M1;
  Mat3 M2;
  Mat3 M3;
};
MMatrices m_matrices(const EarthModel& E, const Geodetic& geo, const Vec3& v_n);

Vec3 llh_to_ecef(const EarthModel& E, const Geodetic& geo);

/// Iterative inverse of llh_to_ecef, converged to machine precision.
Geodetic ecef_to_llh(const EarthModel& E, const Vec3& r_e);

/// Rotation from e to n at the given position.
Mat3 C_e_n(const Geodetic& geo);

/// Earth-centre-to-body vector resolved in n: C_e^n * llh_to_ecef(geo).
Vec3 r_eb_n(const EarthModel& E, const Geodetic& geo);

/// Geodetic coordinates of the point llh_to_ecef(geo) + C_n^e dr_n.
Geodetic displace(const EarthModel& E, const Geodetic& geo, const Vec3& dr_n);

}  // namespace liese
