/**
 * @file  liegroup.hpp
 * @brief SO(3) and SE_2(3) algebra: hat/vee, exponential and logarithm,
 *        left Jacobian, composition, adjoint and concentrated-Gaussian sampling.
 *
 * An SE_2(3) element is stored as the triple (R, v, p). Its 5x5 embedding
 *
 *     [ R  v  p ]
 *     [ 0  1  0 ]
 *     [ 0  0  1 ]
 *
 * is available through to_matrix() and is used by tests and by the
 * group-affinity check. Tangent vectors are ordered (phi, rho_v, rho_r).
 */
#pragma once

#include <Eigen/Dense>
#include <random>

namespace liese {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;

/// Below this rotation angle the Taylor branches are used.
inline constexpr double kSmallAngle = 1e-6;
/// log() refuses rotations whose angle is closer than this to pi.
inline constexpr double kNearPiMargin = 1e-5;

/// Skew-symmetric matrix such that skew(a) * b = a x b.
Mat3 skew(const Vec3& a);

/// Rotation-matrix exponential exp(skew(phi)).
Mat3 so3_exp(const Vec3& phi);

/// Rotation-vector logarithm. Throws NearPiRotation near angle pi.
Vec3 so3_log(const Mat3& R);

/// Left Jacobian of SO(3): sum_n (phi x)^n / (n+1)!.
Mat3 left_jacobian(const Vec3& phi);

/// Inverse of left_jacobian(phi), valid for |phi| < 2 pi.
Mat3 left_jacobian_inv(const Vec3& phi);

/// Nearest rotation matrix in the Frobenius sense (polar projection).
Mat3 orthonormalize(const Mat3& C);

/// Tangent vector (phi, rho_v, rho_r) of SE_2(3).
struct Tangent {
  Vec3 phi = Vec3::Zero();
  Vec3 rho_v = Vec3::Zero();
  Vec3 rho_r = Vec3::Zero();

  Vec9 vec() const;
  static Tangent from(const Vec9& x);
};

/// Element of SE_2(3).
struct SE23 {
  Mat3 R = Mat3::Identity();
  Vec3 v = Vec3::Zero();
  Vec3 p = Vec3::Zero();

  static SE23 identity() { return SE23{}; }
  /// 5x5 matrix embedding.
  Mat5 to_matrix() const;
  /// Inverse of to_matrix(); the bottom rows are not checked.
  static SE23 from_matrix(const Mat5& M);
};

/// Lie-algebra isomorphism Lambda: R^9 -> 5x5.
Mat5 hat(const Tangent& xi);
Mat5 hat(const Vec9& xi);

/// Inverse of hat. Throws PatternViolation if M is not in the algebra
/// (tolerance 1e-12).
Tangent vee(const Mat5& M);

/// Closed-form group exponential.
SE23 exp(const Tangent& xi);
SE23 exp(const Vec9& xi);

/// Group logarithm. Throws NearPiRotation when the angle is within
/// kNearPiMargin of pi.
Tangent log(const SE23& T);

SE23 compose(const SE23& A, const SE23& B);
SE23 inverse(const SE23& A);
SE23 operator*(const SE23& A, const SE23& B);

/// Adjoint Ad_A such that A exp(xi) A^-1 = exp(Ad_A xi).
Mat9 adjoint(const SE23& A);

/// Side on which the tangent perturbation multiplies the mean.
enum class Side { Left, Right };

/**
 * Draw from a concentrated Gaussian: mean * exp(eps) (Left) or
 * exp(eps) * mean (Right), eps ~ N(0, P). Throws NotPSD if P is not
 * symmetric positive semidefinite within 1e-12.
 */
SE23 sample_concentrated_gaussian(const SE23& mean, const Mat9& P, Side side,
                                  std::mt19937_64& rng);

}  // namespace liese
