/**
 * @file  simulator.cpp
 * @brief Analytic trajectories and sensor synthesis.
 */
#include "liese/simulator.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <string>

#include "liese/errors.hpp"

namespace liese {

namespace {

/// Tangent-plane position and its first two derivatives (NED at origin).
struct PlaneKinematics {
  Vec3 p, dp, ddp;
};

PlaneKinematics plane_kinematics(const TrajectorySpec& s, double t) {
  PlaneKinematics k{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  switch (s.kind) {
    case TrajectoryKind::Stationary: break;
    case TrajectoryKind::StraightConstV: {
      const Vec3 u(std::cos(s.heading), std::sin(s.heading), 0.0);
      k.p = s.speed * t * u;
      k.dp = s.speed * u;
      break;
    }
    case TrajectoryKind::Circle: {
      const double w = s.speed / s.radius;
      const double c = std::cos(w * t), sn = std::sin(w * t);
      k.p = Vec3(s.radius * sn, s.radius * (1.0 - c), 0.0);
      k.dp = Vec3(s.speed * c, s.speed * sn, 0.0);
      k.ddp = Vec3(-s.speed * w * sn, s.speed * w * c, 0.0);
      break;
    }
    case TrajectoryKind::FigureEight: {
      const double w = 2.0 * M_PI / s.period;
      const double a = s.scale;
      const double s1 = std::sin(w * t), c1 = std::cos(w * t);
      const double s2 = std::sin(2.0 * w * t), c2 = std::cos(2.0 * w * t);
      k.p = Vec3(a * s1, 0.5 * a * s2, 0.0);
      k.dp = Vec3(a * w * c1, a * w * c2, 0.0);
      k.ddp = Vec3(-a * w * w * s1, -2.0 * a * w * w * s2, 0.0);
      break;
    }
  }
  return k;
}

Mat3 yaw_rotation(double psi) {
  Mat3 C;
  C << std::cos(psi), -std::sin(psi), 0.0,  //
      std::sin(psi), std::cos(psi), 0.0,     //
      0.0, 0.0, 1.0;
  return C;
}

/// Full analytic state with the derivatives needed to invert mechanization.
struct AnalyticState {
  NavStateNED s;
  Vec3 dv_n;
  double psi_rate;
};

AnalyticState analytic_state(const TrajectorySpec& spec, double t,
                             const EarthModel& E) {
  const PlaneKinematics k = plane_kinematics(spec, t);
  const Mat3 C_n0_e = C_e_n(spec.origin).transpose();
  const Vec3 r_e = llh_to_ecef(E, spec.origin) + C_n0_e * k.p;

  AnalyticState a;
  a.s.geo = ecef_to_llh(E, r_e);
  const Mat3 Cen = C_e_n(a.s.geo);
  a.s.v_eb_n = Cen * C_n0_e * k.dp;
  const TransportRates w = transport_rates(E, a.s.geo, a.s.v_eb_n);
  // d/dt (C_e^n v^e) = -omega_en x v^n + C_e^n a^e.
  a.dv_n = -w.omega_en_n.cross(a.s.v_eb_n) + Cen * C_n0_e * k.ddp;

  const double vn = a.s.v_eb_n.x(), ve = a.s.v_eb_n.y();
  const double h2 = vn * vn + ve * ve;
  double psi = 0.0;
  a.psi_rate = 0.0;
  if (spec.kind != TrajectoryKind::Stationary && h2 > 0.0) {
    psi = std::atan2(ve, vn);
    a.psi_rate = (vn * a.dv_n.y() - ve * a.dv_n.x()) / h2;
  }
  a.s.C_b_n = yaw_rotation(psi);
  return a;
}

}  // namespace

void validate(const TrajectorySpec& s) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (!(s.imu_dt > 0.0)) fail("imu_dt must be positive");
  if (!(s.gnss_dt > 0.0)) fail("gnss_dt must be positive");
  if (!(s.duration > 0.0)) fail("duration must be positive");
  const double ratio = s.gnss_dt / s.imu_dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || ratio < 0.5) {
    fail("gnss_dt must be an integer multiple of imu_dt");
  }
  if (s.kind == TrajectoryKind::Circle && !(s.radius > 0.0)) {
    fail("circle radius must be positive");
  }
  if (s.kind == TrajectoryKind::FigureEight &&
      !(s.period > 0.0 && s.scale > 0.0)) {
    fail("figure-eight scale and period must be positive");
  }
  if ((s.kind == TrajectoryKind::Circle ||
       s.kind == TrajectoryKind::StraightConstV) &&
      !(s.speed > 0.0)) {
    fail("speed must be positive");
  }
}

std::size_t imu_steps(const TrajectorySpec& spec) {
  return static_cast<std::size_t>(std::llround(spec.duration / spec.imu_dt));
}

std::size_t gnss_stride(const TrajectorySpec& spec) {
  return static_cast<std::size_t>(std::llround(spec.gnss_dt / spec.imu_dt));
}

NavStateNED truth_at(const TrajectorySpec& spec, double t,
                     const EarthModel& E) {
  return analytic_state(spec, t, E).s;
}

ImuSample true_imu_at(const TrajectorySpec& spec, double t,
                      const EarthModel& E) {
  const AnalyticState a = analytic_state(spec, t, E);
  const TransportRates w = transport_rates(E, a.s.geo, a.s.v_eb_n);
  const Mat3 C_n_b = a.s.C_b_n.transpose();
  ImuSample imu;
  imu.t = t;
  imu.omega_ib_b = C_n_b * w.omega_in_n + Vec3(0.0, 0.0, a.psi_rate);
  imu.f_ib_b = C_n_b * (a.dv_n +
                        (2.0 * w.omega_ie_n + w.omega_en_n).cross(a.s.v_eb_n) -
                        gravity_n(E, a.s.geo));
  return imu;
}

std::vector<TruthSample> generate_truth(const TrajectorySpec& spec,
                                        const EarthModel& E) {
  validate(spec);
  const std::size_t n = imu_steps(spec);
  std::vector<TruthSample> out;
  out.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * spec.imu_dt;
    out.push_back(TruthSample{t, truth_at(spec, t, E)});
  }
  return out;
}

std::vector<ImuSample> synthesize_imu(const TrajectorySpec& spec,
                                      const EarthModel& E) {
  validate(spec);
  static const double kNodes[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double kWeights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  const std::size_t n = imu_steps(spec);
  const double dt = spec.imu_dt;
  std::vector<ImuSample> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t0 = static_cast<double>(k) * dt;
    ImuSample mean;
    mean.t = t0;
    for (int q = 0; q < 3; ++q) {
      const double tq = t0 + 0.5 * dt * (1.0 + kNodes[q]);
      const ImuSample s = true_imu_at(spec, tq, E);
      mean.omega_ib_b += kWeights[q] * s.omega_ib_b;
      mean.f_ib_b += kWeights[q] * s.f_ib_b;
    }
    out.push_back(mean);
  }
  return out;
}

std::vector<GnssFix> sample_gnss(const std::vector<TruthSample>& truth,
                                 const Vec3& lever_arm_b, const Mat3& R_e,
                                 std::size_t stride, std::mt19937_64& rng,
                                 const EarthModel& E) {
  if (stride == 0) throw ConfigError("GNSS stride must be positive");
  const Eigen::LLT<Mat3> llt(R_e);
  Mat3 L = Mat3::Zero();
  if (R_e.norm() > 0.0) {
    if (llt.info() != Eigen::Success) {
      throw ConfigError("GNSS covariance is not positive definite");
    }
    L = llt.matrixL();
  }
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<GnssFix> out;
  for (std::size_t k = stride; k < truth.size(); k += stride) {
    const NavStateECEF e = to_ecef(truth[k].state, E);
    Vec3 n;
    for (int i = 0; i < 3; ++i) n(i) = n01(rng);
    GnssFix fix;
    fix.t = truth[k].t;
    fix.pos_e = e.r + e.C_b_e * lever_arm_b + L * n;
    fix.R_e = R_e;
    fix.lever_arm_b = lever_arm_b;
    out.push_back(fix);
  }
  return out;
}

}  // namespace liese
