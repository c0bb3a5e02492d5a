/**
 * @file  smoother.cpp
 * @brief RTS backward pass with group-consistent state combination.
 */
#include "liese/smoother.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <string>

#include "liese/errors.hpp"

namespace liese {

namespace {

/// Gain P_k Phi^T P_pred^-1, regularizing P_pred once if it does not factor.
Mat15 smoother_gain(const ForwardRecord& r, std::size_t k) {
  const Mat15 PhiP = r.Phi * r.P_post;  // (P Phi^T)^T
  Eigen::LLT<Mat15> llt(r.P_pred);
  if (llt.info() != Eigen::Success) {
    // The floor follows the magnitude of P so that it stays above rounding
    // when earth-centred coordinates inflate the covariance.
    const double floor = kPredCovFloor * std::max(1.0, r.P_pred.norm());
    llt.compute(r.P_pred + floor * Mat15::Identity());
    if (llt.info() != Eigen::Success) {
      throw SingularPredCov("predicted covariance at record " +
                            std::to_string(k) + " is not positive definite");
    }
  }
  return llt.solve(PhiP).transpose();
}

}  // namespace

std::vector<SmoothedState> rts_smooth(const std::vector<ForwardRecord>& records,
                                      const Variant& variant,
                                      const EarthModel& E) {
  std::vector<SmoothedState> out(records.size());
  if (records.empty()) return out;
  for (std::size_t k = 1; k < records.size(); ++k) {
    if (!(records[k].t > records[k - 1].t)) {
      throw NonMonotoneTime("forward record " + std::to_string(k) +
                            " is not later than its predecessor");
    }
  }
  const std::size_t n = records.size();
  out[n - 1] = SmoothedState{records[n - 1].t, records[n - 1].nominal,
                             records[n - 1].P_post};
  for (std::size_t i = n - 1; i-- > 0;) {
    const ForwardRecord& r = records[i];
    const Mat15 C = smoother_gain(r, i);
    const Vec15 delta =
        error_between(out[i + 1].nominal, r.nominal_pred, variant, E);
    out[i].t = r.t;
    out[i].nominal = apply_correction(r.nominal, C * delta, variant, E);
    out[i].P = symmetrize(
        Mat15(r.P_post + C * (out[i + 1].P - r.P_pred) * C.transpose()));
  }
  return out;
}

}  // namespace liese
