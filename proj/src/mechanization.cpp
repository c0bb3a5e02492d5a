/**
 * @file  mechanization.cpp
 * @brief Strapdown kinematics and fixed-step integration.
 */
#include "liese/mechanization.hpp"

#include <cmath>
#include <string>

#include "liese/errors.hpp"

namespace liese {

namespace {

NavStateNED advance(const NavStateNED& s, const NedDerivative& d, double h) {
  NavStateNED out;
  out.C_b_n = s.C_b_n + h * d.dC;
  out.v_eb_n = s.v_eb_n + h * d.dv;
  out.geo = Geodetic::from(s.geo.vec() + h * d.dgeo);
  return out;
}

NavStateECEF advance(const NavStateECEF& s, const EcefDerivative& d, double h) {
  NavStateECEF out = s;
  out.C_b_e = s.C_b_e + h * d.dC;
  out.v = s.v + h * d.dv;
  out.r = s.r + h * d.dr;
  return out;
}

NedDerivative weighted(const NedDerivative& k1, const NedDerivative& k2,
                       const NedDerivative& k3, const NedDerivative& k4) {
  return NedDerivative{(k1.dC + 2.0 * k2.dC + 2.0 * k3.dC + k4.dC) / 6.0,
                       (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv) / 6.0,
                       (k1.dgeo + 2.0 * k2.dgeo + 2.0 * k3.dgeo + k4.dgeo) / 6.0};
}

EcefDerivative weighted(const EcefDerivative& k1, const EcefDerivative& k2,
                        const EcefDerivative& k3, const EcefDerivative& k4) {
  return EcefDerivative{(k1.dC + 2.0 * k2.dC + 2.0 * k3.dC + k4.dC) / 6.0,
                        (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv) / 6.0,
                        (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr) / 6.0};
}

double ortho_error(const Mat3& C) {
  return (C.transpose() * C - Mat3::Identity()).norm();
}

template <class State, class Deriv>
State generic_step(const State& s, double dt, IntegrationMethod method,
                   Deriv deriv) {
  const auto k1 = deriv(s);
  if (method == IntegrationMethod::Euler) return advance(s, k1, dt);
  const auto k2 = deriv(advance(s, k1, 0.5 * dt));
  const auto k3 = deriv(advance(s, k2, 0.5 * dt));
  const auto k4 = deriv(advance(s, k3, dt));
  return advance(s, weighted(k1, k2, k3, k4), dt);
}

void check_times(const std::vector<ImuSample>& imu) {
  for (std::size_t k = 1; k < imu.size(); ++k) {
    if (!(imu[k].t > imu[k - 1].t)) {
      throw NonMonotoneTime("IMU sample " + std::to_string(k) + " at t=" +
                            std::to_string(imu[k].t) +
                            " does not follow t=" +
                            std::to_string(imu[k - 1].t));
    }
  }
}

}  // namespace

NedDerivative ned_derivative(const NavStateNED& s, const ImuSample& imu,
                             const EarthModel& E) {
  const TransportRates w = transport_rates(E, s.geo, s.v_eb_n);
  const Radii r = radii(E, s.geo.lat);
  NedDerivative d;
  d.dC = s.C_b_n * skew(imu.omega_ib_b) - skew(w.omega_in_n) * s.C_b_n;
  d.dv = s.C_b_n * imu.f_ib_b -
         (2.0 * w.omega_ie_n + w.omega_en_n).cross(s.v_eb_n) +
         gravity_n(E, s.geo);
  d.dgeo = Vec3(s.v_eb_n.x() / (r.R_M + s.geo.h),
                s.v_eb_n.y() / ((r.R_N + s.geo.h) * std::cos(s.geo.lat)),
                -s.v_eb_n.z());
  return d;
}

EcefDerivative ecef_derivative(const NavStateECEF& s, const ImuSample& imu,
                               const EarthModel& E) {
  const Vec3 w = E.omega_ie_e();
  EcefDerivative d;
  d.dC = s.C_b_e * skew(imu.omega_ib_b) - skew(w) * s.C_b_e;
  const Vec3 f_e = s.C_b_e * imu.f_ib_b;
  if (s.convention == VelocityConvention::EarthRelative) {
    d.dv = f_e - 2.0 * w.cross(s.v) + gravity_e(E, s.r);
    d.dr = s.v;
  } else {
    d.dv = f_e - w.cross(s.v) + gravitation_e(E, s.r);
    d.dr = -w.cross(s.r) + s.v;
  }
  return d;
}

NedAuxDerivative ned_auxiliary_derivative(const NavStateNEDAux& s,
                                          const ImuSample& imu,
                                          const EarthModel& E) {
  const Vec3 r = r_eb_n(E, s.geo);
  const Vec3 v = s.vbar_n - omega_ie_n(E, s.geo.lat).cross(r);
  const TransportRates w = transport_rates(E, s.geo, v);
  NedAuxDerivative d;
  d.dC = s.C_b_n * skew(imu.omega_ib_b) - skew(w.omega_in_n) * s.C_b_n;
  d.dvbar = s.C_b_n * imu.f_ib_b - w.omega_in_n.cross(s.vbar_n) +
            gravitation_n(E, s.geo);
  d.dr = -w.omega_in_n.cross(r) + s.vbar_n;
  return d;
}

NavStateECEF convert(const NavStateECEF& s, VelocityConvention to,
                     const EarthModel& E) {
  const Vec3 wxr = E.omega_ie_e().cross(s.r);
  NavStateECEF out = s;
  const bool from_rel = s.convention == VelocityConvention::EarthRelative;
  const bool to_rel = to == VelocityConvention::EarthRelative;
  if (from_rel && !to_rel) out.v = s.v + wxr;
  if (!from_rel && to_rel) out.v = s.v - wxr;
  out.convention = to;
  return out;
}

NavStateECEF to_ecef(const NavStateNED& s, const EarthModel& E,
                     VelocityConvention conv) {
  const Mat3 Cne = C_e_n(s.geo).transpose();
  NavStateECEF out{Cne * s.C_b_n, Cne * s.v_eb_n, llh_to_ecef(E, s.geo),
                   VelocityConvention::EarthRelative};
  return convert(out, conv, E);
}

NavStateNED to_ned(const NavStateECEF& s, const EarthModel& E) {
  const NavStateECEF rel = convert(s, VelocityConvention::EarthRelative, E);
  NavStateNED out;
  out.geo = ecef_to_llh(E, rel.r);
  const Mat3 Cen = C_e_n(out.geo);
  out.C_b_n = Cen * rel.C_b_e;
  out.v_eb_n = Cen * rel.v;
  return out;
}

NavStateNEDAux to_auxiliary(const NavStateNED& s, const EarthModel& E) {
  const Vec3 r = r_eb_n(E, s.geo);
  return NavStateNEDAux{s.C_b_n,
                        s.v_eb_n + omega_ie_n(E, s.geo.lat).cross(r), s.geo};
}

NavStateNED from_auxiliary(const NavStateNEDAux& s, const EarthModel& E) {
  const Vec3 r = r_eb_n(E, s.geo);
  return NavStateNED{s.C_b_n,
                     s.vbar_n - omega_ie_n(E, s.geo.lat).cross(r), s.geo};
}

NavStateNED step(const NavStateNED& s, const ImuSample& imu, double dt,
                 IntegrationMethod method, const EarthModel& E) {
  NavStateNED out = generic_step(
      s, dt, method,
      [&](const NavStateNED& x) { return ned_derivative(x, imu, E); });
  if (ortho_error(out.C_b_n) > kOrthoTolerance) {
    out.C_b_n = orthonormalize(out.C_b_n);
  }
  return out;
}

NavStateECEF step(const NavStateECEF& s, const ImuSample& imu, double dt,
                  IntegrationMethod method, const EarthModel& E) {
  NavStateECEF out = generic_step(
      s, dt, method,
      [&](const NavStateECEF& x) { return ecef_derivative(x, imu, E); });
  if (ortho_error(out.C_b_e) > kOrthoTolerance) {
    out.C_b_e = orthonormalize(out.C_b_e);
  }
  return out;
}

std::vector<NavStateNED> integrate(const NavStateNED& s0,
                                   const std::vector<ImuSample>& imu, double dt,
                                   IntegrationMethod method,
                                   const EarthModel& E) {
  check_times(imu);
  std::vector<NavStateNED> out{s0};
  out.reserve(imu.size() + 1);
  for (std::size_t k = 0; k < imu.size(); ++k) {
    NavStateNED next = step(out.back(), imu[k], dt, method, E);
    if ((k + 1) % kOrthoPeriod == 0) next.C_b_n = orthonormalize(next.C_b_n);
    out.push_back(next);
  }
  return out;
}

std::vector<NavStateECEF> integrate(const NavStateECEF& s0,
                                    const std::vector<ImuSample>& imu,
                                    double dt, IntegrationMethod method,
                                    const EarthModel& E) {
  check_times(imu);
  std::vector<NavStateECEF> out{s0};
  out.reserve(imu.size() + 1);
  for (std::size_t k = 0; k < imu.size(); ++k) {
    NavStateECEF next = step(out.back(), imu[k], dt, method, E);
    if ((k + 1) % kOrthoPeriod == 0) next.C_b_e = orthonormalize(next.C_b_e);
    out.push_back(next);
  }
  return out;
}

}  // namespace liese
