/**
 * @file  earth.cpp
 * @brief WGS-84 ellipsoid, gravity and frame utilities.
 */
#include "liese/earth.hpp"

#include <cmath>
#include <string>

#include "liese/errors.hpp"

namespace liese {

namespace {

void check_pole(double lat) {
  if (std::abs(lat) > M_PI / 2.0 - kPoleGuard) {
    throw PoleSingularity("latitude " + std::to_string(lat) +
                          " rad is inside the pole guard");
  }
}

/// Derivatives of the radii with respect to latitude.
void radii_lat_derivatives(const EarthModel& E, double lat, double& dRM,
                           double& dRN) {
  const double s = std::sin(lat), c = std::cos(lat);
  const double w = 1.0 - E.e2 * s * s;
  const Radii r = radii(E, lat);
  dRN = r.R_N * E.e2 * s * c / w;
  dRM = r.R_M * 3.0 * E.e2 * s * c / w;
}

}  // namespace

Radii radii(const EarthModel& E, double lat) {
  const double s = std::sin(lat);
  const double w = 1.0 - E.e2 * s * s;
  const double sw = std::sqrt(w);
  return Radii{E.a * (1.0 - E.e2) / (w * sw), E.a / sw};
}

Vec3 omega_ie_n(const EarthModel& E, double lat) {
  return Vec3(E.omega_ie * std::cos(lat), 0.0, -E.omega_ie * std::sin(lat));
}

TransportRates transport_rates(const EarthModel& E, const Geodetic& geo,
                               const Vec3& v_n) {
  check_pole(geo.lat);
  const Radii r = radii(E, geo.lat);
  const double RN = r.R_N + geo.h, RM = r.R_M + geo.h;
  TransportRates t;
  t.omega_ie_n = omega_ie_n(E, geo.lat);
  t.omega_en_n = Vec3(v_n.y() / RN, -v_n.x() / RM,
                      -v_n.y() * std::tan(geo.lat) / RN);
  t.omega_in_n = t.omega_ie_n + t.omega_en_n;
  return t;
}

double gravity_magnitude(const EarthModel& E, const Geodetic& geo) {
  if (!E.gravity_enabled) return 0.0;
  const double s2 = std::sin(geo.lat) * std::sin(geo.lat);
  const double g0 =
      E.gamma_e * (1.0 + E.somigliana_k * s2) / std::sqrt(1.0 - E.e2 * s2);
  return g0 - E.free_air * geo.h;
}

Vec3 gravity_n(const EarthModel& E, const Geodetic& geo) {
  return Vec3(0.0, 0.0, gravity_magnitude(E, geo));
}

Vec3 gravitation_n(const EarthModel& E, const Geodetic& geo) {
  const Mat3 W = skew(omega_ie_n(E, geo.lat));
  return gravity_n(E, geo) + W * W * r_eb_n(E, geo);
}

Vec3 gravity_e(const EarthModel& E, const Vec3& r_e) {
  const Geodetic geo = ecef_to_llh(E, r_e);
  return C_e_n(geo).transpose() * gravity_n(E, geo);
}

Vec3 gravitation_e(const EarthModel& E, const Vec3& r_e) {
  const Mat3 W = skew(E.omega_ie_e());
  return gravity_e(E, r_e) + W * W * r_e;
}

Mat3 gravity_gradient_n(const EarthModel& E, const Geodetic& geo) {
  Mat3 G = Mat3::Zero();
  if (!E.gravity_enabled) return G;
  const double s = std::sin(geo.lat), c = std::cos(geo.lat);
  const double D = std::sqrt(1.0 - E.e2 * s * s);
  const double N = 1.0 + E.somigliana_k * s * s;
  const double dgamma_dlat =
      E.gamma_e * s * c * (2.0 * E.somigliana_k * D * D + N * E.e2) /
      (D * D * D);
  const double gamma = gravity_magnitude(E, geo);
  const Radii r = radii(E, geo.lat);
  const double RM = r.R_M + geo.h, RN = r.R_N + geo.h;
  // Horizontal rows: tilt of the local vertical under a displacement.
  G(0, 0) = -gamma / RM;
  G(1, 1) = -gamma / RN;
  // Vertical row: change of the magnitude with latitude and height.
  G(2, 0) = dgamma_dlat / RM;
  G(2, 2) = E.free_air;
  return G;
}

Mat3 gravity_gradient_e(const EarthModel& E, const Vec3& r_e) {
  const Geodetic geo = ecef_to_llh(E, r_e);
  const Mat3 Cen = C_e_n(geo);
  return Cen.transpose() * gravity_gradient_n(E, geo) * Cen;
}

Vec3 gravity_perturbation_n(const EarthModel& E, const Geodetic& geo,
                            double delta_r_D) {
  const Radii r = radii(E, geo.lat);
  const double g = gravity_magnitude(E, geo);
  return Vec3(0.0, 0.0,
              2.0 * g / (std::sqrt(r.R_M * r.R_N) + geo.h) * delta_r_D);
}

Vec3 gravity_perturbation_e(const EarthModel& E, const Vec3& r_e,
                            const Vec3& delta_r_e) {
  const double n = r_e.norm();
  return -(E.mu / (n * n * n)) * delta_r_e;
}

MMatrices m_matrices(const EarthModel& E, const Geodetic& geo,
                     const Vec3& v_n) {
  check_pole(geo.lat);
  const double s = std::sin(geo.lat), c = std::cos(geo.lat);
  const double t = std::tan(geo.lat);
  const Radii r = radii(E, geo.lat);
  const double RM = r.R_M + geo.h, RN = r.R_N + geo.h;
  double dRM, dRN;
  radii_lat_derivatives(E, geo.lat, dRM, dRN);
  const double vN = v_n.x(), vE = v_n.y();

  MMatrices m;
  // delta lat = dr_N / RM, delta h = -dr_D; longitude does not enter.
  m.M1 = Mat3::Zero();
  m.M1(0, 0) = -E.omega_ie * s / RM;
  m.M1(2, 0) = -E.omega_ie * c / RM;

  m.M2 = Mat3::Zero();
  m.M2(0, 1) = 1.0 / RN;
  m.M2(1, 0) = -1.0 / RM;
  m.M2(2, 1) = -t / RN;

  // Partial derivatives of omega_en with respect to latitude and height.
  const Vec3 d_lat(-vE * dRN / (RN * RN), vN * dRM / (RM * RM),
                   -vE * ((1.0 + t * t) / RN - t * dRN / (RN * RN)));
  const Vec3 d_h(-vE / (RN * RN), vN / (RM * RM), vE * t / (RN * RN));
  m.M3 = Mat3::Zero();
  m.M3.col(0) = d_lat / RM;
  m.M3.col(2) = -d_h;
  return m;
}

Vec3 llh_to_ecef(const EarthModel& E, const Geodetic& geo) {
  const double s = std::sin(geo.lat), c = std::cos(geo.lat);
  const double RN = E.a / std::sqrt(1.0 - E.e2 * s * s);
  return Vec3((RN + geo.h) * c * std::cos(geo.lon),
              (RN + geo.h) * c * std::sin(geo.lon),
              (RN * (1.0 - E.e2) + geo.h) * s);
}

Geodetic ecef_to_llh(const EarthModel& E, const Vec3& r_e) {
  const double p = std::hypot(r_e.x(), r_e.y());
  Geodetic g;
  g.lon = std::atan2(r_e.y(), r_e.x());
  double lat = std::atan2(r_e.z(), p * (1.0 - E.e2));
  for (int i = 0; i < 20; ++i) {
    const double s = std::sin(lat);
    const double RN = E.a / std::sqrt(1.0 - E.e2 * s * s);
    const double next = std::atan2(r_e.z() + E.e2 * RN * s, p);
    const bool done = std::abs(next - lat) < 1e-16;
    lat = next;
    if (done) break;
  }
  const double s = std::sin(lat), c = std::cos(lat);
  g.lat = lat;
  g.h = p * c + r_e.z() * s - E.a * std::sqrt(1.0 - E.e2 * s * s);
  return g;
}

Mat3 C_e_n(const Geodetic& geo) {
  const double sp = std::sin(geo.lat), cp = std::cos(geo.lat);
  const double sl = std::sin(geo.lon), cl = std::cos(geo.lon);
  Mat3 C;
  C << -sp * cl, -sp * sl, cp,  //
      -sl, cl, 0.0,             //
      -cp * cl, -cp * sl, -sp;
  return C;
}

Vec3 r_eb_n(const EarthModel& E, const Geodetic& geo) {
  return C_e_n(geo) * llh_to_ecef(E, geo);
}

Geodetic displace(const EarthModel& E, const Geodetic& geo, const Vec3& dr_n) {
  return ecef_to_llh(E,
                     llh_to_ecef(E, geo) + C_e_n(geo).transpose() * dr_n);
}

}  // namespace liese
