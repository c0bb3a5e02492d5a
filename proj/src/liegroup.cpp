/**
 * @file  liegroup.cpp
 * @brief SO(3) and SE_2(3) algebra.
 */
#include "liese/liegroup.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "liese/errors.hpp"

namespace liese {

namespace {

// Coefficients of I + a K + b K^2 style closed forms:
//   sin(t)/t, (1-cos t)/t^2, (t-sin t)/t^3
// Below kSmallAngle all three use 4-term Taylor expansions. The third
// coefficient cancels catastrophically up to moderate angles, so it keeps
// the expansion up to kSeriesAngle, where the truncation error is below
// 1e-15 relative. The second uses the half-angle form, which does not cancel.
constexpr double kSeriesAngle = 0.1;

double third_coeff_series(double t2) {
  const double t4 = t2 * t2;
  return 1.0 / 6.0 - t2 / 120.0 + t4 / 5040.0 - t4 * t2 / 362880.0;
}

struct RodriguesCoeffs {
  double a, b, c;
};

RodriguesCoeffs rodrigues_coeffs(double t) {
  const double t2 = t * t;
  if (t < kSmallAngle) {
    const double t4 = t2 * t2, t6 = t4 * t2;
    return {1.0 - t2 / 6.0 + t4 / 120.0 - t6 / 5040.0,
            0.5 - t2 / 24.0 + t4 / 720.0 - t6 / 40320.0, third_coeff_series(t2)};
  }
  const double s = std::sin(t);
  const double sinc_half = std::sin(0.5 * t) / (0.5 * t);
  const double c = t < kSeriesAngle ? third_coeff_series(t2) : (t - s) / (t2 * t);
  return {s / t, 0.5 * sinc_half * sinc_half, c};
}

}  // namespace

Mat3 skew(const Vec3& a) {
  Mat3 S;
  S << 0.0, -a.z(), a.y(),  //
      a.z(), 0.0, -a.x(),   //
      -a.y(), a.x(), 0.0;
  return S;
}

Mat3 so3_exp(const Vec3& phi) {
  const Mat3 K = skew(phi);
  const auto k = rodrigues_coeffs(phi.norm());
  return Mat3::Identity() + k.a * K + k.b * K * K;
}

Vec3 so3_log(const Mat3& R) {
  const Vec3 w(0.5 * (R(2, 1) - R(1, 2)), 0.5 * (R(0, 2) - R(2, 0)),
               0.5 * (R(1, 0) - R(0, 1)));
  const double s = w.norm();
  const double c = 0.5 * (R.trace() - 1.0);
  const double t = std::atan2(s, c);
  if (t > M_PI - kNearPiMargin) {
    throw NearPiRotation("rotation angle " + std::to_string(t) +
                         " rad is too close to pi");
  }
  if (t < kSmallAngle) {
    // t / sin(t) = 1 + t^2/6 + 7 t^4/360 + 31 t^6/15120
    const double t2 = t * t;
    return (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0 +
            31.0 * t2 * t2 * t2 / 15120.0) *
           w;
  }
  return (t / s) * w;
}

Mat3 left_jacobian(const Vec3& phi) {
  const Mat3 K = skew(phi);
  const auto k = rodrigues_coeffs(phi.norm());
  return Mat3::Identity() + k.b * K + k.c * K * K;
}

Mat3 left_jacobian_inv(const Vec3& phi) {
  const double t = phi.norm();
  const Mat3 K = skew(phi);
  double d;
  if (t < kSeriesAngle) {
    const double t2 = t * t;
    d = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0 +
        t2 * t2 * t2 / 1209600.0;
  } else {
    const double half = 0.5 * t;
    d = 1.0 / (t * t) - std::cos(half) / (std::sin(half) * 2.0 * t);
  }
  return Mat3::Identity() - 0.5 * K + d * K * K;
}

Mat3 orthonormalize(const Mat3& C) {
  Eigen::JacobiSVD<Mat3> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 R = svd.matrixU() * svd.matrixV().transpose();
  if (R.determinant() < 0.0) {
    Mat3 U = svd.matrixU();
    U.col(2) *= -1.0;
    R = U * svd.matrixV().transpose();
  }
  return R;
}

Vec9 Tangent::vec() const {
  Vec9 x;
  x << phi, rho_v, rho_r;
  return x;
}

Tangent Tangent::from(const Vec9& x) {
  return Tangent{x.segment<3>(0), x.segment<3>(3), x.segment<3>(6)};
}

Mat5 SE23::to_matrix() const {
  Mat5 M = Mat5::Identity();
  M.block<3, 3>(0, 0) = R;
  M.block<3, 1>(0, 3) = v;
  M.block<3, 1>(0, 4) = p;
  return M;
}

SE23 SE23::from_matrix(const Mat5& M) {
  return SE23{M.block<3, 3>(0, 0), M.block<3, 1>(0, 3), M.block<3, 1>(0, 4)};
}

Mat5 hat(const Tangent& xi) {
  Mat5 M = Mat5::Zero();
  M.block<3, 3>(0, 0) = skew(xi.phi);
  M.block<3, 1>(0, 3) = xi.rho_v;
  M.block<3, 1>(0, 4) = xi.rho_r;
  return M;
}

Mat5 hat(const Vec9& xi) { return hat(Tangent::from(xi)); }

Tangent vee(const Mat5& M) {
  constexpr double tol = 1e-12;
  if (M.block<2, 5>(3, 0).cwiseAbs().maxCoeff() > tol) {
    throw PatternViolation("rows 4-5 of a Lie-algebra element must be zero");
  }
  const Mat3 S = M.block<3, 3>(0, 0);
  if ((S + S.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw PatternViolation("top-left block is not skew-symmetric");
  }
  return Tangent{Vec3(S(2, 1), S(0, 2), S(1, 0)), M.block<3, 1>(0, 3),
                 M.block<3, 1>(0, 4)};
}

SE23 exp(const Tangent& xi) {
  const Mat3 K = skew(xi.phi);
  const auto k = rodrigues_coeffs(xi.phi.norm());
  const Mat3 K2 = K * K;
  const Mat3 J = Mat3::Identity() + k.b * K + k.c * K2;
  return SE23{Mat3::Identity() + k.a * K + k.b * K2, J * xi.rho_v,
              J * xi.rho_r};
}

SE23 exp(const Vec9& xi) { return exp(Tangent::from(xi)); }

Tangent log(const SE23& T) {
  const Vec3 phi = so3_log(T.R);
  const Mat3 Jinv = left_jacobian_inv(phi);
  return Tangent{phi, Jinv * T.v, Jinv * T.p};
}

SE23 compose(const SE23& A, const SE23& B) {
  return SE23{A.R * B.R, A.R * B.v + A.v, A.R * B.p + A.p};
}

SE23 inverse(const SE23& A) {
  const Mat3 Rt = A.R.transpose();
  return SE23{Rt, -Rt * A.v, -Rt * A.p};
}

SE23 operator*(const SE23& A, const SE23& B) { return compose(A, B); }

Mat9 adjoint(const SE23& A) {
  Mat9 Ad = Mat9::Zero();
  Ad.block<3, 3>(0, 0) = A.R;
  Ad.block<3, 3>(3, 3) = A.R;
  Ad.block<3, 3>(6, 6) = A.R;
  Ad.block<3, 3>(3, 0) = skew(A.v) * A.R;
  Ad.block<3, 3>(6, 0) = skew(A.p) * A.R;
  return Ad;
}

SE23 sample_concentrated_gaussian(const SE23& mean, const Mat9& P, Side side,
                                  std::mt19937_64& rng) {
  constexpr double tol = 1e-12;
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw NotPSD("covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat9> eig(P);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < -tol) {
    throw NotPSD("covariance has a negative eigenvalue");
  }
  std::normal_distribution<double> n01(0.0, 1.0);
  Vec9 z;
  for (int i = 0; i < 9; ++i) z(i) = n01(rng);
  const Vec9 sd = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Vec9 eps = eig.eigenvectors() * sd.cwiseProduct(z);
  const SE23 E = exp(eps);
  return side == Side::Left ? mean * E : E * mean;
}

}  // namespace liese
