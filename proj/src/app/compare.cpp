/**
 * @file  compare.cpp
 * @brief Run-directory comparison.
 */
#include "liese/app/compare.hpp"

#include <cmath>
#include <sstream>

#include "liese/app/csv.hpp"

namespace liese::app {

namespace {

/// Local-level displacement between two geodetic points, formed from the
/// coordinate differences so that no earth-centred cancellation occurs.
double geodetic_distance(const Geodetic& a, const Geodetic& b,
                         const EarthModel& E) {
  const Radii r = radii(E, a.lat);
  const double dn = (b.lat - a.lat) * (r.R_M + a.h);
  const double de = (b.lon - a.lon) * (r.R_N + a.h) * std::cos(a.lat);
  const double dd = a.h - b.h;
  return std::sqrt(dn * dn + de * de + dd * dd);
}

}  // namespace

CompareReport compare_runs(const std::string& dir_a, const std::string& dir_b,
                           double pos_tol_m, double cov_tol) {
  const EarthModel E = EarthModel::wgs84();
  const auto ta = trajectory_from_table(read_csv(dir_a + "/filtered.csv"));
  const auto tb = trajectory_from_table(read_csv(dir_b + "/filtered.csv"));
  const auto ca = covariance_from_table(read_csv(dir_a + "/filtered_cov.csv"));
  const auto cb = covariance_from_table(read_csv(dir_b + "/filtered_cov.csv"));

  CompareReport r;
  r.aligned = ta.size() == tb.size() && ca.size() == cb.size();
  const std::size_t n = std::min(ta.size(), tb.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (ta[k].t != tb[k].t) r.aligned = false;
    r.max_dpos_m = std::max(r.max_dpos_m,
                            geodetic_distance(ta[k].state.geo, tb[k].state.geo, E));
  }
  r.epochs = n;
  const std::size_t m = std::min(ca.size(), cb.size());
  for (std::size_t k = 0; k < m; ++k) {
    if (ca[k].t != cb[k].t) r.aligned = false;
    r.max_dcov = std::max(r.max_dcov, (ca[k].P - cb[k].P).norm());
  }
  r.cov_epochs = m;
  r.pass = r.aligned && r.max_dpos_m <= pos_tol_m && r.max_dcov <= cov_tol;
  if (!r.aligned) r.message = "epoch counts or times differ";
  return r;
}

std::string format_report(const CompareReport& r, double pos_tol_m,
                          double cov_tol) {
  std::ostringstream s;
  s.precision(6);
  s << "epochs compared: " << r.epochs << " (covariance epochs: "
    << r.cov_epochs << ")\n";
  s << "max |dposition| [m]: " << std::scientific << r.max_dpos_m
    << " (tol " << pos_tol_m << ")\n";
  s << "max |dP|_F: " << r.max_dcov << " (tol " << cov_tol << ")\n";
  if (!r.message.empty()) s << "note: " << r.message << "\n";
  s << (r.pass ? "PASS" : "FAIL") << "\n";
  return s.str();
}

}  // namespace liese::app
