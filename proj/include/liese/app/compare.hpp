/**
 * @file  compare.hpp
 * @brief Epoch-by-epoch comparison of two run directories.
 */
#pragma once

#include <string>

namespace liese::app {

struct CompareReport {
  std::size_t epochs = 0;
  std::size_t cov_epochs = 0;
  double max_dpos_m = 0.0;  ///< max over epochs of |position A - position B|
  double max_dcov = 0.0;    ///< max over covariance epochs of |P_A - P_B|_F
  bool aligned = true;      ///< same epoch count and times
  bool pass = false;
  std::string message;
};

/// Compares filtered.csv and filtered_cov.csv of two runs. Throws IoError.
CompareReport compare_runs(const std::string& dir_a, const std::string& dir_b,
                           double pos_tol_m, double cov_tol);

/// Multi-line human-readable report ending with PASS or FAIL.
std::string format_report(const CompareReport& r, double pos_tol_m,
                          double cov_tol);

}  // namespace liese::app
