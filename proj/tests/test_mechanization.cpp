#include <gtest/gtest.h>

#include "liese/errors.hpp"
#include "liese/mechanization.hpp"
#include "liese/simulator.hpp"
#include "oracles.hpp"

using namespace liese;
using liese::oracle::random_rotation;
using liese::oracle::random_vec;

namespace {

const EarthModel E = EarthModel::wgs84();

NavStateNED random_ned(std::mt19937_64& rng) {
  NavStateNED s;
  s.geo = Geodetic{std::uniform_real_distribution<double>(-1.2, 1.2)(rng), 0.4,
                   std::uniform_real_distribution<double>(0.0, 2000.0)(rng)};
  s.v_eb_n = random_vec(rng, 30.0);
  s.C_b_n = random_rotation(rng);
  return s;
}

ImuSample random_sample(std::mt19937_64& rng) {
  return ImuSample{0.0, random_vec(rng, 0.3), Vec3(0, 0, -9.8) + random_vec(rng, 3.0)};
}

std::vector<ImuSample> constant_stream(const ImuSample& u, double dt, int n) {
  std::vector<ImuSample> out(static_cast<std::size_t>(n), u);
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)].t = k * dt;
  return out;
}

double ned_distance(const Geodetic& a, const Geodetic& b) {
  const Radii r = radii(E, a.lat);
  return Vec3((b.lat - a.lat) * (r.R_M + a.h),
              (b.lon - a.lon) * (r.R_N + a.h) * std::cos(a.lat), b.h - a.h)
      .norm();
}

}  // namespace

TEST(NedDerivative, StaticEquilibrium) {
  NavStateNED s;
  s.geo = Geodetic{0.7, 0.1, 300};
  s.C_b_n = so3_exp(Vec3(0.1, -0.2, 1.3));
  const Vec3 w_ie = omega_ie_n(E, s.geo.lat);
  const ImuSample u{0.0, s.C_b_n.transpose() * w_ie,
                    -s.C_b_n.transpose() * gravity_n(E, s.geo)};
  const NedDerivative d = ned_derivative(s, u, E);
  EXPECT_LE(d.dv.norm(), 1e-15);
  EXPECT_LE(d.dgeo.norm(), 1e-20);
  EXPECT_LE((d.dC - (s.C_b_n * skew(u.omega_ib_b) - skew(w_ie) * s.C_b_n)).norm(), 1e-20);
  EXPECT_LE(d.dC.norm(), 1e-18);
}

TEST(NedDerivative, FreeFall) {
  NavStateNED s;
  s.geo = Geodetic{0.3, 0.0, 10};
  const NedDerivative d = ned_derivative(s, ImuSample{}, E);
  EXPECT_EQ(d.dv, gravity_n(E, s.geo));
}

TEST(NedDerivative, MatchesComponentFormulas) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const NavStateNED s = random_ned(rng);
    const ImuSample u = random_sample(rng);
    const NedDerivative d = ned_derivative(s, u, E);

    const double L = s.geo.lat, h = s.geo.h, w = E.omega_ie;
    const double sL = std::sin(L), cL = std::cos(L);
    const double RN = E.a / std::sqrt(1 - E.e2 * sL * sL);
    const double RM = RN * (1 - E.e2) / (1 - E.e2 * sL * sL);
    const double vN = s.v_eb_n(0), vE = s.v_eb_n(1), vD = s.v_eb_n(2);
    const Vec3 f = s.C_b_n * u.f_ib_b;
    const double g = (9.7803253359 * (1 + 0.00193185265241 * sL * sL) /
                      std::sqrt(1 - E.e2 * sL * sL)) - 3.086e-6 * h;
    const double tL = sL / cL;
    const double dvN = f(0) - vE * (2 * w * sL + vE * tL / (RN + h)) + vN * vD / (RM + h);
    const double dvE = f(1) + vN * (2 * w * sL + vE * tL / (RN + h)) +
                       vD * (2 * w * cL + vE / (RN + h));
    const double dvD = f(2) - vE * vE / (RN + h) - vN * vN / (RM + h) -
                       2 * w * vE * cL + g;
    EXPECT_LE((d.dv - Vec3(dvN, dvE, dvD)).norm(), 1e-12);
    EXPECT_LE((d.dgeo - Vec3(vN / (RM + h), vE / ((RN + h) * cL), -vD)).norm(), 1e-16);

    const Vec3 w_in(w * cL + vE / (RN + h), -vN / (RM + h), -w * sL - vE * tL / (RN + h));
    Mat3 Win, Wib;
    Win << 0, -w_in(2), w_in(1), w_in(2), 0, -w_in(0), -w_in(1), w_in(0), 0;
    const Vec3& o = u.omega_ib_b;
    Wib << 0, -o(2), o(1), o(2), 0, -o(0), -o(1), o(0), 0;
    EXPECT_LE((d.dC - (s.C_b_n * Wib - Win * s.C_b_n)).norm(), 1e-15);
  }
}

TEST(NedDerivative, PoleGuard) {
  NavStateNED s;
  s.geo.lat = M_PI / 2.0;
  EXPECT_THROW(ned_derivative(s, ImuSample{}, E), PoleSingularity);
}

TEST(EcefDerivative, FreeFallPointsDown) {
  NavStateECEF s;
  s.r = llh_to_ecef(E, Geodetic{0.5, 0.5, 0});
  const EcefDerivative d = ecef_derivative(s, ImuSample{}, E);
  EXPECT_EQ(d.dv, gravity_e(E, s.r));
  EXPECT_LT(d.dv.normalized().dot(s.r.normalized()), -0.99);
}

TEST(EcefDerivative, AuxiliaryRelation) {
  std::mt19937_64 rng(2);
  const NavStateNED n = random_ned(rng);
  const NavStateECEF rel = to_ecef(n, E);
  const NavStateECEF aux = to_ecef(n, E, VelocityConvention::Auxiliary);
  EXPECT_LE((aux.v - (rel.v + E.omega_ie_e().cross(rel.r))).norm(), 1e-9);
}

TEST(EcefDerivative, ConventionsAgreeAfterIntegration) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) {
    const NavStateNED n0 = random_ned(rng);
    const auto imu = constant_stream(random_sample(rng), 0.01, 1000);
    const NavStateNED ned = integrate(n0, imu, 0.01, IntegrationMethod::RK4, E).back();
    for (VelocityConvention c : {VelocityConvention::EarthRelative,
                                 VelocityConvention::Inertial,
                                 VelocityConvention::Auxiliary}) {
      const NavStateECEF e = integrate(to_ecef(n0, E, c), imu, 0.01,
                                       IntegrationMethod::RK4, E).back();
      const NavStateNED back = to_ned(e, E);
      EXPECT_LE(ned_distance(ned.geo, back.geo), 1e-6) << static_cast<int>(c);
    }
  }
}

TEST(AuxiliaryDerivative, ConstructionAndGravitation) {
  std::mt19937_64 rng(4);
  const NavStateNED n = random_ned(rng);
  const NavStateNEDAux a = to_auxiliary(n, E);
  const Vec3 r = r_eb_n(E, n.geo);
  EXPECT_LE((a.vbar_n - n.v_eb_n - omega_ie_n(E, n.geo.lat).cross(r)).norm(), 1e-12);
  const Mat3 W = skew(omega_ie_n(E, n.geo.lat));
  EXPECT_LE((gravitation_n(E, n.geo) - gravity_n(E, n.geo) - W * W * r).norm(), 1e-15);
}

TEST(AuxiliaryDerivative, ChainRule) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const NavStateNED n = random_ned(rng);
    const ImuSample u = random_sample(rng);
    const NavStateNEDAux a = to_auxiliary(n, E);
    const NedAuxDerivative da = ned_auxiliary_derivative(a, u, E);
    const NedDerivative dn = ned_derivative(n, u, E);
    const TransportRates w = transport_rates(E, n.geo, n.v_eb_n);
    const Vec3 r = r_eb_n(E, n.geo);
    const Vec3 r_dot = -w.omega_en_n.cross(r) + n.v_eb_n;
    const double lat_dot = dn.dgeo.x();
    const Vec3 wie_dot(-E.omega_ie * std::sin(n.geo.lat) * lat_dot, 0.0,
                       -E.omega_ie * std::cos(n.geo.lat) * lat_dot);
    const Vec3 expected = dn.dv + wie_dot.cross(r) + w.omega_ie_n.cross(r_dot);
    EXPECT_LE((da.dvbar - expected).norm(), 1e-9);
    EXPECT_LE((da.dC - dn.dC).norm(), 1e-18);
  }
}

TEST(Integrate, ZeroInputsKeepStateConstant) {
  EarthModel still = E;
  still.omega_ie = 0.0;
  still.gravity_enabled = false;
  NavStateNED s0;
  s0.geo = Geodetic{0.5, 0.2, 100};
  s0.C_b_n = so3_exp(Vec3(0.3, 0.2, 0.1));
  const auto out = integrate(s0, constant_stream(ImuSample{}, 0.01, 500), 0.01,
                             IntegrationMethod::RK4, still);
  EXPECT_EQ(out.back().geo.vec(), s0.geo.vec());
  EXPECT_EQ(out.back().v_eb_n, s0.v_eb_n);
  EXPECT_LE((out.back().C_b_n - s0.C_b_n).norm(), 1e-15);
}

TEST(Integrate, PureRotationMatchesClosedForm) {
  EarthModel still = E;
  still.omega_ie = 0.0;
  still.gravity_enabled = false;
  const double w = 0.7;
  NavStateNED s0;
  s0.geo = Geodetic{0.5, 0.2, 100};
  const auto out = integrate(s0, constant_stream(ImuSample{0.0, Vec3(0, 0, w), Vec3::Zero()},
                                                 1e-3, 1000),
                             1e-3, IntegrationMethod::RK4, still);
  EXPECT_LE((out.back().C_b_n - so3_exp(Vec3(0, 0, w * 1.0))).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Integrate, RejectsNonMonotoneTime) {
  std::vector<ImuSample> imu(3);
  imu[0].t = 0.0;
  imu[1].t = 0.01;
  imu[2].t = 0.01;
  EXPECT_THROW(integrate(NavStateNED{}, imu, 0.01, IntegrationMethod::RK4, E),
               NonMonotoneTime);
}

TEST(Integrate, KeepsRotationOrthonormal) {
  std::mt19937_64 rng(6);
  const auto out = integrate(random_ned(rng), constant_stream(random_sample(rng), 0.01, 2000),
                             0.01, IntegrationMethod::Euler, E);
  for (const NavStateNED& s : out) {
    EXPECT_LE((s.C_b_n.transpose() * s.C_b_n - Mat3::Identity()).norm(), 1e-9);
  }
}

TEST(Integrate, FourthOrderConvergence) {
  std::mt19937_64 rng(7);
  const NavStateNED s0 = random_ned(rng);
  const ImuSample u = random_sample(rng);
  const double T = 20.0;
  auto run = [&](double dt) {
    const int n = static_cast<int>(std::lround(T / dt));
    return integrate(s0, constant_stream(u, dt, n), dt, IntegrationMethod::RK4, E).back();
  };
  const NavStateNED ref = run(0.5 / 64.0);
  const double e1 = ned_distance(run(0.5).geo, ref.geo);
  const double e2 = ned_distance(run(0.25).geo, ref.geo);
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LT(e1 / e2, 20.0);
}

TEST(Integrate, RungeKuttaBeatsEulerOnCircle) {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::Circle;
  spec.imu_dt = 0.01;
  const auto truth = generate_truth(spec, E);
  const auto imu = synthesize_imu(spec, E);
  const auto rk = integrate(truth.front().state, imu, spec.imu_dt, IntegrationMethod::RK4, E);
  const auto eu = integrate(truth.front().state, imu, spec.imu_dt, IntegrationMethod::Euler, E);
  const double e_rk = ned_distance(rk.back().geo, truth.back().state.geo);
  const double e_eu = ned_distance(eu.back().geo, truth.back().state.geo);
  EXPECT_GT(e_eu, 100.0 * e_rk);
}
