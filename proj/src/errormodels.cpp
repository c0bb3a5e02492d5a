/**
 * @file  errormodels.cpp
 * @brief Error definitions, retraction, error dynamics and measurement models.
 */
#include "liese/errormodels.hpp"

#include <array>

#include "liese/errors.hpp"

namespace liese {

namespace {

struct SupportRow {
  Frame frame;
  std::vector<ErrorDef> defs;
};

const std::array<SupportRow, 5>& support_table() {
  static const std::array<SupportRow, 5> table{{
      {Frame::NED,
       {ErrorDef::RightTrue, ErrorDef::RightEst, ErrorDef::LeftTrue,
        ErrorDef::LeftEst}},
      {Frame::NED_Aux, {ErrorDef::LeftEst, ErrorDef::RightTrue}},
      {Frame::ECEF,
       {ErrorDef::LeftTrue, ErrorDef::LeftEst, ErrorDef::RightEst,
        ErrorDef::RightTrue}},
      {Frame::ECEF_Inertial,
       {ErrorDef::LeftTrue, ErrorDef::LeftEst, ErrorDef::RightEst}},
      {Frame::ECEF_Aux, {ErrorDef::RightTrue}},
  }};
  return table;
}

constexpr std::array<Frame, 5> kFrames{Frame::NED, Frame::ECEF,
                                       Frame::ECEF_Inertial, Frame::NED_Aux,
                                       Frame::ECEF_Aux};
constexpr std::array<ErrorDef, 4> kDefs{ErrorDef::RightTrue, ErrorDef::RightEst,
                                        ErrorDef::LeftTrue, ErrorDef::LeftEst};

/// Rotates the three group blocks of a tangent vector by C.
Vec9 rotate_tangent(const Mat3& C, const Vec9& xi) {
  Vec9 out;
  out.segment<3>(0) = C * xi.segment<3>(0);
  out.segment<3>(3) = C * xi.segment<3>(3);
  out.segment<3>(6) = C * xi.segment<3>(6);
  return out;
}

/// Group error in e for the given definition.
SE23 group_error(const SE23& X, const SE23& Xt, ErrorDef d) {
  switch (d) {
    case ErrorDef::RightTrue: return X * inverse(Xt);
    case ErrorDef::RightEst: return Xt * inverse(X);
    case ErrorDef::LeftTrue: return inverse(X) * Xt;
    case ErrorDef::LeftEst: return inverse(Xt) * X;
  }
  return SE23::identity();
}

/// Solves group_error(X, Xt, d) == exp(xi) for X.
SE23 retract(const SE23& Xt, const Vec9& xi, ErrorDef d) {
  switch (d) {
    case ErrorDef::RightTrue: return exp(xi) * Xt;
    case ErrorDef::RightEst: return exp(Vec9(-xi)) * Xt;
    case ErrorDef::LeftTrue: return Xt * exp(Vec9(-xi));
    case ErrorDef::LeftEst: return Xt * exp(xi);
  }
  return Xt;
}

/// Solves group_error(X, Xt, d) == exp(xi) for Xt.
SE23 unretract(const SE23& X, const Vec9& xi, ErrorDef d) {
  switch (d) {
    case ErrorDef::RightTrue: return exp(Vec9(-xi)) * X;
    case ErrorDef::RightEst: return exp(xi) * X;
    case ErrorDef::LeftTrue: return X * exp(xi);
    case ErrorDef::LeftEst: return X * exp(Vec9(-xi));
  }
  return X;
}

/// Right-defined group coordinates are resolved in the nominal frame.
Vec9 tangent_to_e(const Vec9& xi, const NavState& nominal, const Variant& v,
                  const EarthModel& E) {
  if (!is_right(v.error_def)) return xi;
  return rotate_tangent(frame_rotation(nominal, v.frame, E).transpose(), xi);
}

constexpr int kMaxFixedPointPasses = 60;

Mat15 flip_matrix() {
  Mat15 S = Mat15::Identity();
  S.topLeftCorner<9, 9>() *= -1.0;
  return S;
}

/// F and G for X Xt^-1 coordinates.
void right_true_blocks(const FrameTerms& t, Mat15& F, Mat15x12& G) {
  const Mat3 I = Mat3::Identity();
  const Mat3 vx = skew(t.v), rx = skew(t.r);
  const Mat3 bx = skew(t.beta), dx = skew(t.delta);

  F.block<3, 3>(kPhi, kPhi) = -t.A;
  F.block<3, 3>(kPhi, kBg) = -t.C;

  F.block<3, 3>(kVel, kPhi) = -vx * bx + skew(t.a) - t.Gamma * rx;
  F.block<3, 3>(kVel, kVel) = bx - t.A;
  F.block<3, 3>(kVel, kPos) = t.Gamma;
  F.block<3, 3>(kVel, kBg) = -vx * t.C;
  F.block<3, 3>(kVel, kBa) = -t.C;

  F.block<3, 3>(kPos, kPhi) = -rx * dx;
  F.block<3, 3>(kPos, kVel) = I;
  F.block<3, 3>(kPos, kPos) = dx - t.A;
  F.block<3, 3>(kPos, kBg) = -rx * t.C;

  G.block<3, 3>(kPhi, 0) = -t.C;
  G.block<3, 3>(kVel, 0) = -vx * t.C;
  G.block<3, 3>(kPos, 0) = -rx * t.C;
  G.block<3, 3>(kVel, 3) = -t.C;
}

/// F and G for Xt^-1 X coordinates.
void left_est_blocks(const FrameTerms& t, const Vec3& w_hat, const Vec3& f_hat,
                     Mat15& F, Mat15x12& G) {
  const Mat3 I = Mat3::Identity();
  const Mat3 wx = skew(w_hat);
  const Mat3 Ct = t.C.transpose();

  F.block<3, 3>(kPhi, kPhi) = -wx;
  F.block<3, 3>(kPhi, kBg) = -I;

  F.block<3, 3>(kVel, kPhi) = -skew(f_hat);
  F.block<3, 3>(kVel, kVel) = -wx + skew(Ct * t.beta);
  F.block<3, 3>(kVel, kPos) = Ct * t.Gamma * t.C;
  F.block<3, 3>(kVel, kBa) = -I;

  F.block<3, 3>(kPos, kVel) = I;
  F.block<3, 3>(kPos, kPos) = -wx + skew(Ct * t.delta);

  G.block<3, 3>(kPhi, 0) = -I;
  G.block<3, 3>(kVel, 3) = -I;
}

Mat3 earth_rate_squared(const Vec3& w) {
  const Mat3 W = skew(w);
  return W * W;
}

}  // namespace

bool is_right(ErrorDef d) {
  return d == ErrorDef::RightTrue || d == ErrorDef::RightEst;
}

bool is_true_form(ErrorDef d) {
  return d == ErrorDef::RightTrue || d == ErrorDef::LeftTrue;
}

bool is_ned_family(Frame f) { return f == Frame::NED || f == Frame::NED_Aux; }

bool is_supported(const Variant& v) {
  if (v.mems_simplified && v.frame == Frame::NED) return false;
  for (const SupportRow& row : support_table()) {
    if (row.frame != v.frame) continue;
    for (ErrorDef d : row.defs) {
      if (d == v.error_def) return true;
    }
  }
  return false;
}

void require_supported(const Variant& v) {
  if (!is_supported(v)) {
    throw UnsupportedVariant("variant " + to_string(v) + " is not supported");
  }
}

std::vector<Variant> supported_variants(bool include_mems) {
  std::vector<Variant> out;
  for (const SupportRow& row : support_table()) {
    for (ErrorDef d : row.defs) out.push_back(Variant{row.frame, d, false});
  }
  if (include_mems) {
    for (const SupportRow& row : support_table()) {
      if (row.frame == Frame::NED) continue;
      for (ErrorDef d : row.defs) out.push_back(Variant{row.frame, d, true});
    }
  }
  return out;
}

std::string to_string(Frame f) {
  switch (f) {
    case Frame::NED: return "NED";
    case Frame::ECEF: return "ECEF";
    case Frame::ECEF_Inertial: return "ECEF_Inertial";
    case Frame::NED_Aux: return "NED_Aux";
    case Frame::ECEF_Aux: return "ECEF_Aux";
  }
  return "?";
}

std::string to_string(ErrorDef d) {
  switch (d) {
    case ErrorDef::RightTrue: return "RightTrue";
    case ErrorDef::RightEst: return "RightEst";
    case ErrorDef::LeftTrue: return "LeftTrue";
    case ErrorDef::LeftEst: return "LeftEst";
  }
  return "?";
}

std::string to_string(const Variant& v) {
  return to_string(v.frame) + "_" + to_string(v.error_def) +
         (v.mems_simplified ? "+mems" : "");
}

Variant parse_variant(const std::string& name) {
  std::string body = name;
  bool mems = false;
  const std::string suffix = "+mems";
  if (body.size() > suffix.size() &&
      body.compare(body.size() - suffix.size(), suffix.size(), suffix) == 0) {
    mems = true;
    body.resize(body.size() - suffix.size());
  }
  for (Frame f : kFrames) {
    for (ErrorDef d : kDefs) {
      if (body == to_string(f) + "_" + to_string(d)) return Variant{f, d, mems};
    }
  }
  throw UnsupportedVariant("unknown variant name '" + name + "'");
}

VelocityConvention velocity_convention(Frame f) {
  switch (f) {
    case Frame::NED:
    case Frame::ECEF: return VelocityConvention::EarthRelative;
    case Frame::NED_Aux:
    case Frame::ECEF_Inertial: return VelocityConvention::Inertial;
    case Frame::ECEF_Aux: return VelocityConvention::Auxiliary;
  }
  return VelocityConvention::EarthRelative;
}

NavState represent(const NavStateNED& s, Frame f, const EarthModel& E) {
  if (is_ned_family(f)) return s;
  return to_ecef(s, E, velocity_convention(f));
}

NavStateNED nav_to_ned(const NavState& s, const EarthModel& E) {
  if (const auto* n = std::get_if<NavStateNED>(&s)) return *n;
  return to_ned(std::get<NavStateECEF>(s), E);
}

NavStateECEF nav_to_ecef(const NavState& s, VelocityConvention conv,
                         const EarthModel& E) {
  if (const auto* n = std::get_if<NavStateNED>(&s)) return to_ecef(*n, E, conv);
  return convert(std::get<NavStateECEF>(s), conv, E);
}

SE23 group_state_e(const NavState& s, Frame f, const EarthModel& E) {
  const NavStateECEF e = nav_to_ecef(s, velocity_convention(f), E);
  return SE23{e.C_b_e, e.v, e.r};
}

Mat3 frame_rotation(const NavState& s, Frame f, const EarthModel& E) {
  if (!is_ned_family(f)) return Mat3::Identity();
  return C_e_n(nav_to_ned(s, E).geo);
}

SE23 group_state(const NavState& s, Frame f, const EarthModel& E) {
  const SE23 X = group_state_e(s, f, E);
  const Mat3 R = frame_rotation(s, f, E);
  return SE23{R * X.R, R * X.v, R * X.p};
}

NavState from_group_e(const SE23& X, Frame f, const EarthModel& E) {
  const NavStateECEF e{orthonormalize(X.R), X.v, X.p, velocity_convention(f)};
  if (is_ned_family(f)) return to_ned(e, E);
  return e;
}

SE23 truth_in_frame_of(const NavState& truth, const NavState& nominal, Frame f,
                       const EarthModel& E) {
  const SE23 X = group_state_e(truth, f, E);
  const Mat3 R = frame_rotation(nominal, f, E);
  return SE23{R * X.R, R * X.v, R * X.p};
}

Vec15 error_between(const FullState& truth, const FullState& nominal,
                    const Variant& v, const EarthModel& E) {
  const SE23 X = group_state_e(truth.nav, v.frame, E);
  const SE23 Xt = group_state_e(nominal.nav, v.frame, E);
  Vec9 xi = log(group_error(X, Xt, v.error_def)).vec();
  if (is_right(v.error_def)) {
    xi = rotate_tangent(frame_rotation(nominal.nav, v.frame, E), xi);
  }
  Vec15 dx;
  dx.head<9>() = xi;
  dx.segment<3>(kBg) = truth.bias.b_g - nominal.bias.b_g;
  dx.segment<3>(kBa) = truth.bias.b_a - nominal.bias.b_a;
  return dx;
}

FullState apply_correction(const FullState& nominal, const Vec15& dx,
                           const Variant& v, const EarthModel& E) {
  const Vec9 xi_e = tangent_to_e(dx.head<9>(), nominal.nav, v, E);
  const SE23 X = retract(group_state_e(nominal.nav, v.frame, E), xi_e,
                         v.error_def);
  FullState out;
  out.nav = from_group_e(X, v.frame, E);
  out.bias.b_g = nominal.bias.b_g + dx.segment<3>(kBg);
  out.bias.b_a = nominal.bias.b_a + dx.segment<3>(kBa);
  return out;
}

FullState initialize_nominal(const FullState& truth, const Vec15& dx,
                             const Variant& v, const EarthModel& E) {
  const SE23 X = group_state_e(truth.nav, v.frame, E);
  FullState nominal = truth;
  nominal.bias.b_g = truth.bias.b_g - dx.segment<3>(kBg);
  nominal.bias.b_a = truth.bias.b_a - dx.segment<3>(kBa);
  // The right-defined coordinates depend on the nominal frame itself. The
  // fixed point contracts by roughly the attitude error per pass.
  const bool iterate = is_right(v.error_def) && is_ned_family(v.frame);
  Vec9 previous = Vec9::Zero();
  for (int i = 0; i < (iterate ? kMaxFixedPointPasses : 1); ++i) {
    const Vec9 xi_e = tangent_to_e(dx.head<9>(), nominal.nav, v, E);
    nominal.nav = from_group_e(unretract(X, xi_e, v.error_def), v.frame, E);
    if (i > 0 && (xi_e - previous).norm() <= 1e-15 * std::max(1.0, xi_e.norm())) break;
    previous = xi_e;
  }
  return nominal;
}

Mat15 additive_to_variant(const FullState& nominal, const Variant& v,
                          const EarthModel& E) {
  const SE23 X = group_state(nominal.nav, v.frame, E);
  Mat15 J = Mat15::Identity();
  if (is_right(v.error_def)) {
    J.block<3, 3>(kVel, kPhi) = skew(X.v);
    J.block<3, 3>(kPos, kPhi) = skew(X.p);
  } else {
    const Mat3 Ct = X.R.transpose();
    J.block<3, 3>(kPhi, kPhi) = Ct;
    J.block<3, 3>(kVel, kVel) = Ct;
    J.block<3, 3>(kPos, kPos) = Ct;
  }
  if (v.error_def == ErrorDef::RightEst || v.error_def == ErrorDef::LeftTrue) {
    J.topRows<9>() *= -1.0;
  }
  return J;
}

Mat15 variant_to_additive(const FullState& nominal, const Variant& v,
                          const EarthModel& E) {
  const SE23 X = group_state(nominal.nav, v.frame, E);
  Mat15 T = Mat15::Identity();
  if (is_right(v.error_def)) {
    T.block<3, 3>(kVel, kPhi) = -skew(X.v);
    T.block<3, 3>(kPos, kPhi) = -skew(X.p);
  } else {
    T.block<3, 3>(kPhi, kPhi) = X.R;
    T.block<3, 3>(kVel, kVel) = X.R;
    T.block<3, 3>(kPos, kPos) = X.R;
  }
  if (v.error_def == ErrorDef::RightEst || v.error_def == ErrorDef::LeftTrue) {
    T.leftCols<9>() *= -1.0;
  }
  return T;
}

FullState subtract_additive(const FullState& truth, const Vec15& d, Frame f,
                            const EarthModel& E) {
  const Mat3 Rt = frame_rotation(truth.nav, f, E).transpose();
  const SE23 X = group_state_e(truth.nav, f, E);
  const SE23 N{so3_exp(-Rt * d.segment<3>(kPhi)) * X.R, X.v - Rt * d.segment<3>(kVel),
               X.p - Rt * d.segment<3>(kPos)};
  FullState nominal{from_group_e(N, f, E), truth.bias};
  nominal.bias.b_g -= d.segment<3>(kBg);
  nominal.bias.b_a -= d.segment<3>(kBa);
  return nominal;
}

FrameTerms frame_terms(const NavState& nominal, Frame f, const EarthModel& E) {
  FrameTerms t;
  if (is_ned_family(f)) {
    const NavStateNED s = nav_to_ned(nominal, E);
    const TransportRates w = transport_rates(E, s.geo, s.v_eb_n);
    t.C = s.C_b_n;
    t.r = r_eb_n(E, s.geo);
    t.A = skew(w.omega_in_n);
    t.Gamma = gravity_gradient_n(E, s.geo);
    if (f == Frame::NED) {
      t.v = s.v_eb_n;
      t.beta = -w.omega_ie_n;
      t.delta = w.omega_ie_n;
      t.a = gravity_n(E, s.geo);
    } else {
      t.v = s.v_eb_n + w.omega_ie_n.cross(t.r);
      t.beta = Vec3::Zero();
      t.delta = Vec3::Zero();
      t.a = gravitation_n(E, s.geo);
      t.Gamma += earth_rate_squared(w.omega_ie_n);
    }
    return t;
  }
  const NavStateECEF s = nav_to_ecef(nominal, velocity_convention(f), E);
  const Vec3 w = E.omega_ie_e();
  t.C = s.C_b_e;
  t.v = s.v;
  t.r = s.r;
  t.A = skew(w);
  t.Gamma = gravity_gradient_e(E, s.r);
  if (f == Frame::ECEF) {
    t.beta = -w;
    t.delta = w;
    t.a = gravity_e(E, s.r);
  } else {
    t.beta = Vec3::Zero();
    t.delta = Vec3::Zero();
    t.a = gravitation_e(E, s.r);
    t.Gamma += earth_rate_squared(w);
  }
  return t;
}

ErrorDynamics error_dynamics(const Variant& v, const FullState& nominal,
                             const ImuSample& imu, const ImuNoiseParams& noise,
                             const EarthModel& E) {
  require_supported(v);
  FrameTerms t = frame_terms(nominal.nav, v.frame, E);
  if (v.mems_simplified) t.Gamma.setZero();
  const Vec3 w_hat = imu.omega_ib_b - nominal.bias.b_g;
  const Vec3 f_hat = imu.f_ib_b - nominal.bias.b_a;

  ErrorDynamics d;
  d.F.setZero();
  d.G.setZero();
  if (is_right(v.error_def)) {
    right_true_blocks(t, d.F, d.G);
  } else {
    left_est_blocks(t, w_hat, f_hat, d.F, d.G);
  }
  // RightEst and LeftTrue coordinates are the negated group coordinates of
  // RightTrue and LeftEst respectively.
  const bool negate = (v.error_def == ErrorDef::RightEst) ||
                      (v.error_def == ErrorDef::LeftTrue);
  if (negate) {
    const Mat15 S = flip_matrix();
    d.F = S * d.F * S;
    d.G = S * d.G;
  }

  const Mat3 I = Mat3::Identity();
  if (noise.bias_model == BiasModel::GaussMarkov) {
    d.F.block<3, 3>(kBg, kBg) = -I / noise.tau_g;
    d.F.block<3, 3>(kBa, kBa) = -I / noise.tau_a;
  }
  d.G.block<3, 3>(kBg, 6) = I;
  d.G.block<3, 3>(kBa, 9) = I;
  return d;
}

Mat12 continuous_noise(const ImuNoiseParams& p) {
  Mat12 Q = Mat12::Zero();
  Q.block<3, 3>(0, 0).diagonal().setConstant(p.sigma_g * p.sigma_g);
  Q.block<3, 3>(3, 3).diagonal().setConstant(p.sigma_a * p.sigma_a);
  Q.block<3, 3>(6, 6).diagonal().setConstant(p.sigma_bg * p.sigma_bg);
  Q.block<3, 3>(9, 9).diagonal().setConstant(p.sigma_ba * p.sigma_ba);
  return Q;
}

namespace {

/// Navigation-frame innovation and noise map shared by every model.
struct FrameInnovation {
  Mat3 C;
  Vec3 r;
  Vec3 dz;
  Mat3 M;  ///< e to navigation frame
};

FrameInnovation frame_innovation(const FullState& nominal, const Variant& v,
                                 const GnssFix& fix, const EarthModel& E) {
  const SE23 X = group_state(nominal.nav, v.frame, E);
  const Mat3 M = frame_rotation(nominal.nav, v.frame, E);
  const Vec3 y = M * fix.pos_e;
  return FrameInnovation{X.R, X.p, y - (X.p + X.R * fix.lever_arm_b), M};
}

double group_sign(ErrorDef d) { return is_true_form(d) ? 1.0 : -1.0; }

}  // namespace

MeasurementModel measurement_left_invariant(const FullState& nominal,
                                            const Variant& v,
                                            const GnssFix& fix,
                                            const EarthModel& E) {
  if (v.error_def != ErrorDef::LeftEst) {
    throw IncompatibleMode("invariant update requires a LeftEst variant, got " +
                           to_string(v));
  }
  const FrameInnovation fi = frame_innovation(nominal, v, fix, E);
  MeasurementModel m;
  m.H.setZero();
  m.H.block<3, 3>(0, kPhi) = -skew(fix.lever_arm_b);
  m.H.block<3, 3>(0, kPos) = Mat3::Identity();
  m.noise_rotation = fi.C.transpose() * fi.M;
  m.innovation = fi.C.transpose() * fi.dz;
  m.R_effective = m.noise_rotation * fix.R_e * m.noise_rotation.transpose();
  return m;
}

MeasurementModel measurement_right(const FullState& nominal, const Variant& v,
                                   const GnssFix& fix, const EarthModel& E) {
  if (!is_right(v.error_def)) {
    throw IncompatibleMode("right-invariant measurement requires a right "
                           "variant, got " + to_string(v));
  }
  const FrameInnovation fi = frame_innovation(nominal, v, fix, E);
  const double s = group_sign(v.error_def);
  MeasurementModel m;
  m.H.setZero();
  m.H.block<3, 3>(0, kPhi) = -s * skew(fi.r + fi.C * fix.lever_arm_b);
  m.H.block<3, 3>(0, kPos) = s * Mat3::Identity();
  m.noise_rotation = fi.M;
  m.innovation = fi.dz;
  m.R_effective = fi.M * fix.R_e * fi.M.transpose();
  return m;
}

MeasurementModel measurement_se23(const FullState& nominal, const Variant& v,
                                  const GnssFix& fix, const EarthModel& E) {
  if (is_right(v.error_def)) return measurement_right(nominal, v, fix, E);
  const FrameInnovation fi = frame_innovation(nominal, v, fix, E);
  // LeftEst coordinates: phi and rho enter as C(I + phi x) and C rho_r.
  const double s = -group_sign(v.error_def);
  MeasurementModel m;
  m.H.setZero();
  m.H.block<3, 3>(0, kPhi) = -s * fi.C * skew(fix.lever_arm_b);
  m.H.block<3, 3>(0, kPos) = s * fi.C;
  m.noise_rotation = fi.M;
  m.innovation = fi.dz;
  m.R_effective = fi.M * fix.R_e * fi.M.transpose();
  return m;
}

MeasurementModel measurement(const FullState& nominal, const Variant& v,
                             const GnssFix& fix, UpdateMode mode,
                             const EarthModel& E) {
  if (mode == UpdateMode::Invariant) {
    return measurement_left_invariant(nominal, v, fix, E);
  }
  return measurement_se23(nominal, v, fix, E);
}

FrozenExogenous frozen_exogenous(const FrameTerms& t) {
  return FrozenExogenous{t.A, t.beta, t.delta, t.a};
}

Mat5 frame_vector_field(const SE23& X, const ImuSample& imu,
                        const FrozenExogenous& x) {
  Mat5 M = Mat5::Zero();
  M.block<3, 3>(0, 0) = X.R * skew(imu.omega_ib_b) - x.A * X.R;
  M.block<3, 1>(0, 3) =
      X.R * imu.f_ib_b - x.A * X.v + x.beta.cross(X.v) + x.a;
  M.block<3, 1>(0, 4) = -x.A * X.p + x.delta.cross(X.p) + X.v;
  return M;
}

double group_affine_check(const SE23& A, const SE23& B, const ImuSample& imu,
                          const FrozenExogenous& x) {
  const Mat5 a = A.to_matrix(), b = B.to_matrix();
  const Mat5 fI = frame_vector_field(SE23::identity(), imu, x);
  const Mat5 r = frame_vector_field(A * B, imu, x) -
                 frame_vector_field(A, imu, x) * b -
                 a * frame_vector_field(B, imu, x) + a * fI * b;
  return r.norm();
}

}  // namespace liese
