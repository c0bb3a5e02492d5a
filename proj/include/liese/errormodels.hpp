/**
 * @file  errormodels.hpp
 * @brief Error-state variants on SE_2(3): error definitions, retraction,
 *        continuous-time error dynamics (F, G) and GNSS measurement models.
 *
 * Error-state ordering is (phi, rho_v, rho_r, b_g, b_a); the noise ordering
 * is (w_g, w_a, w_bg, w_ba). For the NED-family frames both the true and the
 * estimated state are resolved in the estimated local-level frame.
 */
#pragma once

#include <string>
#include <variant>
#include <vector>

#include "liese/mechanization.hpp"
#include "liese/sensors.hpp"

namespace liese {

using Vec15 = Eigen::Matrix<double, 15, 1>;
using Mat15 = Eigen::Matrix<double, 15, 15>;
using Mat15x12 = Eigen::Matrix<double, 15, 12>;
using Mat12 = Eigen::Matrix<double, 12, 12>;
using Mat3x15 = Eigen::Matrix<double, 3, 15>;
using Mat15x3 = Eigen::Matrix<double, 15, 3>;

/// Block offsets inside the 15-dimensional error state.
inline constexpr int kPhi = 0;
inline constexpr int kVel = 3;
inline constexpr int kPos = 6;
inline constexpr int kBg = 9;
inline constexpr int kBa = 12;

enum class Frame { NED, ECEF, ECEF_Inertial, NED_Aux, ECEF_Aux };

/// RightTrue: X Xt^-1, RightEst: Xt X^-1, LeftTrue: X^-1 Xt, LeftEst: Xt^-1 X.
enum class ErrorDef { RightTrue, RightEst, LeftTrue, LeftEst };

struct Variant {
  Frame frame = Frame::NED;
  ErrorDef error_def = ErrorDef::LeftEst;
  bool mems_simplified = false;

  bool operator==(const Variant&) const = default;
};

bool is_right(ErrorDef d);
bool is_true_form(ErrorDef d);
bool is_ned_family(Frame f);

bool is_supported(const Variant& v);
/// Throws UnsupportedVariant naming the variant.
void require_supported(const Variant& v);
/// All supported combinations, optionally including the MEMS flag.
std::vector<Variant> supported_variants(bool include_mems);

std::string to_string(Frame f);
std::string to_string(ErrorDef d);
/// Format "<frame>_<errordef>" with a "+mems" suffix when flagged.
std::string to_string(const Variant& v);
/// Inverse of to_string. Throws UnsupportedVariant for unknown names.
Variant parse_variant(const std::string& name);

/// Navigation state in the representation used by a frame: NavStateNED for
/// the NED family, NavStateECEF (with the frame's convention) otherwise.
using NavState = std::variant<NavStateNED, NavStateECEF>;

struct FullState {
  NavState nav;
  ImuBiasState bias;
};

/// ECEF velocity convention matching the frame's velocity slot.
VelocityConvention velocity_convention(Frame f);

/// Re-expresses a NED state in the representation used by frame f.
NavState represent(const NavStateNED& s, Frame f, const EarthModel& E);
NavStateNED nav_to_ned(const NavState& s, const EarthModel& E);
NavStateECEF nav_to_ecef(const NavState& s, VelocityConvention conv,
                         const EarthModel& E);

/// Group element resolved in e with the frame's velocity convention.
SE23 group_state_e(const NavState& s, Frame f, const EarthModel& E);
/// Rotation from e to the state's own frame (C_e^n or identity).
Mat3 frame_rotation(const NavState& s, Frame f, const EarthModel& E);
/// Group element resolved in the state's own frame.
SE23 group_state(const NavState& s, Frame f, const EarthModel& E);
/// Inverse of group_state_e.
NavState from_group_e(const SE23& X, Frame f, const EarthModel& E);
/// True state resolved in the frame of the nominal.
SE23 truth_in_frame_of(const NavState& truth, const NavState& nominal, Frame f,
                       const EarthModel& E);

/// Variant error of (truth, nominal): group log in the nominal frame, and
/// bias error b - b_hat.
Vec15 error_between(const FullState& truth, const FullState& nominal,
                    const Variant& v, const EarthModel& E);

/// Retraction: returns the state whose error against `nominal` is dx.
FullState apply_correction(const FullState& nominal, const Vec15& dx,
                           const Variant& v, const EarthModel& E);

/// Returns a nominal with error_between(truth, nominal) == dx.
FullState initialize_nominal(const FullState& truth, const Vec15& dx,
                             const Variant& v, const EarthModel& E);

/**
 * Linear map from additive errors resolved in the nominal's frame to the
 * variant's coordinates. The additive error of a truth against a nominal is
 * (dtheta, dv, dr, dbg, dba) with C = exp(dtheta) C_hat, v = v_hat + dv and
 * r = r_hat + dr on the frame's group slots.
 */
Mat15 additive_to_variant(const FullState& nominal, const Variant& v,
                          const EarthModel& E);

/// Inverse of additive_to_variant, formed in closed form.
Mat15 variant_to_additive(const FullState& nominal, const Variant& v,
                          const EarthModel& E);

/// Nominal whose additive error against the truth is d, with d resolved in
/// the truth's frame: C = exp(dtheta) C_hat, v = v_hat + dv, r = r_hat + dr
/// and b = b_hat + db.
FullState subtract_additive(const FullState& truth, const Vec15& d, Frame f,
                            const EarthModel& E);

/// Kinematic terms of the frame, evaluated at a nominal state:
/// C' = C Omega_b - A C, v' = C f - A v + beta x v + a(r),
/// r' = -A r + delta x r + v, with Gamma = da/dr.
struct FrameTerms {
  Mat3 C;
  Vec3 v;
  Vec3 r;
  Mat3 A;
  Vec3 beta;
  Vec3 delta;
  Vec3 a;
  Mat3 Gamma;
};
FrameTerms frame_terms(const NavState& nominal, Frame f, const EarthModel& E);

struct ErrorDynamics {
  Mat15 F;
  Mat15x12 G;
};

/**
 * Continuous-time error dynamics at the nominal. `imu` is the raw sample;
 * the nominal bias is removed internally. Throws UnsupportedVariant.
 */
ErrorDynamics error_dynamics(const Variant& v, const FullState& nominal,
                             const ImuSample& imu, const ImuNoiseParams& noise,
                             const EarthModel& E);

/// Continuous noise intensity diag(sigma_g^2, sigma_a^2, sigma_bg^2, sigma_ba^2).
Mat12 continuous_noise(const ImuNoiseParams& p);

/// GNSS position fix resolved in e.
struct GnssFix {
  double t = 0.0;
  Vec3 pos_e = Vec3::Zero();       ///< antenna position [m]
  Mat3 R_e = Mat3::Identity();     ///< covariance in e [m^2]
  Vec3 lever_arm_b = Vec3::Zero(); ///< IMU-to-antenna offset in body [m]
};

enum class UpdateMode { Invariant, SE23 };

/// Linearized measurement: z ~ H dx + M n, with n ~ N(0, R_e).
struct MeasurementModel {
  Mat3x15 H;
  Vec3 innovation;     ///< measured minus predicted
  Mat3 R_effective;    ///< M R_e M^T
  Mat3 noise_rotation; ///< M
};

/// Body-frame innovation for LeftEst variants. Throws IncompatibleMode.
MeasurementModel measurement_left_invariant(const FullState& nominal,
                                            const Variant& v,
                                            const GnssFix& fix,
                                            const EarthModel& E);

/// Innovation in the navigation frame for any variant.
MeasurementModel measurement_se23(const FullState& nominal, const Variant& v,
                                  const GnssFix& fix, const EarthModel& E);

/// Navigation-frame model for right-defined variants. Throws IncompatibleMode.
MeasurementModel measurement_right(const FullState& nominal, const Variant& v,
                                   const GnssFix& fix, const EarthModel& E);

/// Dispatches on the update mode.
MeasurementModel measurement(const FullState& nominal, const Variant& v,
                             const GnssFix& fix, UpdateMode mode,
                             const EarthModel& E);

/// Exogenous terms held fixed when testing group affinity.
struct FrozenExogenous {
  Mat3 A;
  Vec3 beta;
  Vec3 delta;
  Vec3 a;
};
FrozenExogenous frozen_exogenous(const FrameTerms& t);

/// Full state-dependent vector field of the frame as a 5x5 matrix.
Mat5 frame_vector_field(const SE23& X, const ImuSample& imu,
                        const FrozenExogenous& x);

/// |f(AB) - f(A) B - A f(B) + A f(I) B|_F.
double group_affine_check(const SE23& A, const SE23& B, const ImuSample& imu,
                          const FrozenExogenous& x);

}  // namespace liese
