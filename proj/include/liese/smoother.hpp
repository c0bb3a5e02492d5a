/**
 * @file  smoother.hpp
 * @brief Rauch-Tung-Striebel smoothing over a stored forward pass, combining
 *        states through the variant's error coordinates.
 */
#pragma once

#include <vector>

#include "liese/filter.hpp"

namespace liese {

/// Regularization, relative to max(1, |P_pred|_F), added to a predicted
/// covariance that fails to factor.
inline constexpr double kPredCovFloor = 1e-12;

/**
 * Forward-pass record at epoch k. nominal and P_post are the filtered
 * (post-update) values at t; nominal_pred, P_pred and Phi describe the
 * prediction from k to k+1 and are unused on the last record.
 */
struct ForwardRecord {
  double t = 0.0;
  FullState nominal;
  Mat15 P_post = Mat15::Identity();
  FullState nominal_pred;
  Mat15 P_pred = Mat15::Identity();
  Mat15 Phi = Mat15::Identity();
};

struct SmoothedState {
  double t = 0.0;
  FullState nominal;
  Mat15 P;
};

/// Backward RTS pass. Throws SingularPredCov, NonMonotoneTime.
std::vector<SmoothedState> rts_smooth(const std::vector<ForwardRecord>& records,
                                      const Variant& variant,
                                      const EarthModel& E);

}  // namespace liese
