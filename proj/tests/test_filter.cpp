#include <gtest/gtest.h>

#include "liese/errors.hpp"
#include "liese/filter.hpp"
#include "oracles.hpp"

using namespace liese;
using namespace liese::oracle;

namespace {

const EarthModel E = EarthModel::wgs84();

FilterModel model_gm() {
  FilterModel m;
  m.noise.sigma_g = 1e-4;
  m.noise.sigma_a = 1e-3;
  m.noise.sigma_bg = 1e-6;
  m.noise.sigma_ba = 1e-5;
  m.noise.tau_g = 300.0;
  m.noise.tau_a = 600.0;
  return m;
}

Mat15 initial_P() {
  Vec15 s;
  s << Vec3::Constant(1e-2), Vec3::Constant(0.1), Vec3::Constant(1.0),
      Vec3::Constant(1e-4), Vec3::Constant(1e-2);
  return s.cwiseAbs2().asDiagonal();
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int r, int c, double scale) {
  std::normal_distribution<double> n01;
  Eigen::MatrixXd M(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) M(i, j) = scale * n01(rng);
  }
  return M;
}

GnssFix fix_for(const FullState& truth, const Vec3& lever, const Mat3& R, double t) {
  const NavStateECEF e = nav_to_ecef(truth.nav, VelocityConvention::EarthRelative, E);
  return GnssFix{t, e.r + e.C_b_e * lever, R, lever};
}

Mat3 random_spd3(std::mt19937_64& rng, double scale) {
  const Eigen::MatrixXd A = random_matrix(rng, 3, 3, scale);
  return Mat3(A * A.transpose()) + scale * scale * Mat3::Identity();
}

}  // namespace

TEST(Discretize, ZeroDynamics) {
  std::mt19937_64 rng(1);
  const Mat15x12 G = random_matrix(rng, 15, 12, 1.0);
  const Mat12 Q = Mat12::Identity() * 0.3;
  const Discretization d = discretize(Mat15::Zero(), G, Q, 0.01);
  EXPECT_EQ(d.Phi, Mat15::Identity());
  EXPECT_LE((d.Qd - G * Q * G.transpose() * 0.01).norm(), 1e-15);
}

TEST(Discretize, ScalarDecayMatchesExponential) {
  const double tau = 2.0;
  for (double dt : {0.01, 0.05, 0.2}) {
    Mat15 F = Mat15::Zero();
    F(9, 9) = -1.0 / tau;
    const Discretization d = discretize(F, Mat15x12::Zero(), Mat12::Zero(), dt);
    const double x = dt / tau;
    EXPECT_LE(std::abs(d.Phi(9, 9) - std::exp(-x)), 1.01 * x * x * x / 6.0) << dt;
  }
}

TEST(Discretize, VanLoanOracleRandom) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const Mat15 F = random_matrix(rng, 15, 15, 1.0);
    const Mat15x12 G = random_matrix(rng, 15, 12, 1.0);
    const Eigen::MatrixXd L = random_matrix(rng, 12, 12, 1.0);
    const Mat12 Q = L * L.transpose();
    const Discretization ours = discretize(F, G, Q, 0.01);
    const Discretization ref = van_loan(F, G, Q, 0.01);
    EXPECT_LE((ours.Qd - ref.Qd).norm(), 0.01 * ref.Qd.norm());
    EXPECT_LE((ours.Phi - ref.Phi).norm(), 1e-3 * ref.Phi.norm());
  }
}

TEST(Discretize, VanLoanOracleNavigation) {
  std::mt19937_64 rng(3);
  const FilterModel m = model_gm();
  for (const Variant& v : supported_variants(false)) {
    const FullState s = random_state(rng, v.frame, E);
    const ErrorDynamics d = error_dynamics(v, s, random_imu(rng), m.noise, E);
    const Mat12 Q = continuous_noise(m.noise);
    const Discretization ours = discretize(d.F, d.G, Q, 0.01);
    const Discretization ref = van_loan(d.F, d.G, Q, 0.01);
    EXPECT_LE((ours.Qd - ref.Qd).norm(), 0.01 * ref.Qd.norm()) << to_string(v);
  }
}

TEST(Predict, BiasBlockFollowsScalarFilter) {
  std::mt19937_64 rng(4);
  const FilterModel m = model_gm();
  FilterState fs{random_state(rng, Frame::NED, E), initial_P(),
                 Variant{Frame::NED, ErrorDef::LeftEst, false}, 0.0};
  const double dt = 0.01;
  const double x = dt / m.noise.tau_g;
  const double phi = 1.0 - x + 0.5 * x * x;
  const double q = m.noise.sigma_bg * m.noise.sigma_bg;
  double p = fs.P(kBg, kBg);
  for (int k = 0; k < 200; ++k) {
    fs = predict(fs, random_imu(rng), dt, m);
    p = phi * p * phi + 0.5 * (phi * q * phi + q) * dt;
    EXPECT_NEAR(fs.P(kBg, kBg), p, 1e-15 * p);
  }
}

TEST(Predict, CovarianceGrowsByProcessNoise) {
  std::mt19937_64 rng(5);
  const FilterModel m = model_gm();
  for (const Variant& v : supported_variants(true)) {
    FilterState fs{random_state(rng, v.frame, E), initial_P(), v, 0.0};
    Mat15 Phi;
    const ImuSample u = random_imu(rng);
    const FilterState out = predict(fs, u, 0.01, m, &Phi);
    const Mat15 Qd = out.P - Phi * fs.P * Phi.transpose();
    // Right-defined coordinates couple attitude with earth-centred positions,
    // so the subtraction above rounds at the scale of the propagated P.
    EXPECT_GE(min_eigenvalue(symmetrize(Qd)), -1e-15 * out.P.norm()) << to_string(v);
    EXPECT_DOUBLE_EQ(out.t, 0.01);
    EXPECT_LE((out.P - out.P.transpose()).norm(), 0.0);
  }
}

TEST(Predict, AdvancesNominalWithBiasCorrectedImu) {
  std::mt19937_64 rng(6);
  const FilterModel m = model_gm();
  const FullState s = random_state(rng, Frame::ECEF, E);
  const FilterState fs{s, initial_P(), Variant{Frame::ECEF, ErrorDef::LeftEst, false}, 0.0};
  const ImuSample u = random_imu(rng);
  ImuSample c = u;
  c.omega_ib_b -= s.bias.b_g;
  c.f_ib_b -= s.bias.b_a;
  const NavStateECEF expected =
      step(std::get<NavStateECEF>(s.nav), c, 0.01, IntegrationMethod::RK4, E);
  const FilterState out = predict(fs, u, 0.01, m);
  EXPECT_EQ(std::get<NavStateECEF>(out.nominal.nav).r, expected.r);
}

TEST(Update, ZeroInnovationKeepsNominalAndShrinksP) {
  std::mt19937_64 rng(7);
  const FilterModel m = model_gm();
  for (const Variant& v : supported_variants(true)) {
    const FullState s = random_state(rng, v.frame, E);
    const FilterState fs{s, initial_P(), v, 0.0};
    UpdateReport rep;
    const FilterState out = update(fs, fix_for(s, Vec3(0.3, 0.1, -1.0), Mat3::Identity(), 0.0),
                                   UpdateMode::SE23, m, &rep);
    EXPECT_LE(rep.z.norm(), 1e-8);
    EXPECT_LE(error_between(out.nominal, s, v, E).cwiseQuotient(jacobian_scales()).norm(), 1e-8);
    // The update works in additive coordinates, so rounding follows the
    // covariance norm there, which for right-defined errors includes the
    // attitude variance times the squared Earth radius.
    const Mat15 T = variant_to_additive(s, v, E);
    const double scale = std::max(1.0, Mat15(T * fs.P * T.transpose()).norm());
    EXPECT_GE(min_eigenvalue(fs.P - out.P), -1e-12 * scale) << to_string(v);
  }
}

TEST(Update, InvariantRequiresLeftEst) {
  std::mt19937_64 rng(8);
  const Variant v{Frame::ECEF, ErrorDef::LeftTrue, false};
  const FullState s = random_state(rng, v.frame, E);
  EXPECT_THROW(update(FilterState{s, initial_P(), v, 0.0},
                      fix_for(s, Vec3::Zero(), Mat3::Identity(), 0.0),
                      UpdateMode::Invariant, model_gm()),
               IncompatibleMode);
}

TEST(Update, GateRejectsOutliersOnlyWhenEnabled) {
  std::mt19937_64 rng(9);
  const Variant v{Frame::NED, ErrorDef::LeftEst, false};
  const FullState s = random_state(rng, v.frame, E);
  GnssFix fix = fix_for(s, Vec3::Zero(), Mat3::Identity(), 0.0);
  fix.pos_e += Vec3(100.0, 0.0, 0.0);
  FilterModel m = model_gm();
  EXPECT_NO_THROW(update(FilterState{s, initial_P(), v, 0.0}, fix, UpdateMode::SE23, m));
  m.gating = true;
  EXPECT_THROW(update(FilterState{s, initial_P(), v, 0.0}, fix, UpdateMode::SE23, m),
               InnovationGateExceeded);
}

TEST(Update, InvariantAndSE23Agree) {
  std::mt19937_64 rng(10);
  const FilterModel m = model_gm();
  for (const Variant& v : supported_variants(true)) {
    if (v.error_def != ErrorDef::LeftEst) continue;
    for (int i = 0; i < 20; ++i) {
      const FullState s = random_state(rng, v.frame, E);
      const FilterState fs{s, initial_P(), v, 0.0};
      GnssFix fix = fix_for(s, random_vec(rng, 1.5), random_spd3(rng, 1.0), 0.0);
      fix.pos_e += random_vec(rng, 2.0);
      UpdateReport ri, rs;
      const FilterState a = update(fs, fix, UpdateMode::Invariant, m, &ri);
      const FilterState b = update(fs, fix, UpdateMode::SE23, m, &rs);
      const Vec15 d = error_between(a.nominal, b.nominal, v, E);
      EXPECT_LE(d.segment<3>(kPos).norm(), 1e-9) << to_string(v);
      EXPECT_LE((a.P - b.P).norm(), 1e-10) << to_string(v);
      const Mat3 C = group_state(s.nav, v.frame, E).R;
      EXPECT_LE((rs.K - ri.K * C.transpose()).norm(), 1e-10 * rs.K.norm());
      EXPECT_NEAR(ri.nis, rs.nis, 1e-9 * rs.nis);
    }
  }
}

TEST(Update, JosephFormKeepsCovariancePositive) {
  const FilterModel m = model_gm();
  for (const Variant& v : supported_variants(false)) {
    SCOPED_TRACE(to_string(v));
    std::mt19937_64 rng(11);
    FilterState fs{random_state(rng, v.frame, E), initial_P(), v, 0.0};
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      fs = predict(fs, random_imu(rng), 0.01, m);
      const double sigma = std::pow(10.0, std::uniform_real_distribution<double>(-4.0, 1.0)(rng));
      GnssFix fix = fix_for(fs.nominal, random_vec(rng, 1.0), random_spd3(rng, sigma), fs.t);
      fix.pos_e += random_vec(rng, sigma);
      fs = update(fs, fix, UpdateMode::SE23, m);
      ASSERT_TRUE(fs.P.allFinite()) << k;
      EXPECT_LE((fs.P - fs.P.transpose()).norm(), 1e-12 * fs.P.norm());
      // Eigenvalues are resolved to about 1e-16 of the norm. Right-defined
      // covariances carry attitude times Earth radius and reach norms near 1e8.
      worst = std::min(worst, min_eigenvalue(fs.P) / std::max(1.0, fs.P.norm()));
    }
    EXPECT_GE(worst, -1e-10);
  }
}
