/**
 * @file  csv.hpp
 * @brief Numeric CSV tables with fixed headers for IMU, GNSS, trajectory,
 *        bias and covariance files. Values are written with 17 significant
 *        digits so every file round-trips exactly.
 */
#pragma once

#include <string>
#include <vector>

#include "liese/simulator.hpp"

namespace liese::app {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Throws IoError when the file cannot be read or a cell is not a number.
CsvTable read_csv(const std::string& path);
/// Parses CSV text. Throws IoError on malformed content.
CsvTable parse_csv(const std::string& text, const std::string& origin);
std::string format_csv(const CsvTable& table);
/// Throws IoError when the file cannot be written.
void write_csv(const std::string& path, const CsvTable& table);

/// Shortest text that parses back to exactly the same double.
std::string format_double(double x);

extern const std::vector<std::string> kImuHeader;
extern const std::vector<std::string> kGnssHeader;
extern const std::vector<std::string> kTrajectoryHeader;
extern const std::vector<std::string> kBiasHeader;

/// Throws IoError unless the header matches exactly.
void require_header(const CsvTable& t, const std::vector<std::string>& expected,
                    const std::string& what);

CsvTable imu_table(const std::vector<ImuSample>& imu);
std::vector<ImuSample> imu_from_table(const CsvTable& t);

/// Diagonal of R_e is stored; off-diagonal terms are dropped.
CsvTable gnss_table(const std::vector<GnssFix>& fixes);
std::vector<GnssFix> gnss_from_table(const CsvTable& t, const Vec3& lever_arm_b);

struct TrajectoryRow {
  double t = 0.0;
  NavStateNED state;
};
/// Attitude is serialized as a unit quaternion with q0 >= 0.
CsvTable trajectory_table(const std::vector<TrajectoryRow>& rows);
std::vector<TrajectoryRow> trajectory_from_table(const CsvTable& t);

struct BiasRow {
  double t = 0.0;
  ImuBiasState bias;
};
CsvTable bias_table(const std::vector<BiasRow>& rows);
std::vector<BiasRow> bias_from_table(const CsvTable& t);

struct CovarianceRow {
  double t = 0.0;
  Mat15 P;
};
/// Upper triangle, row-major, with columns named pRC.
CsvTable covariance_table(const std::vector<CovarianceRow>& rows);
std::vector<CovarianceRow> covariance_from_table(const CsvTable& t);

}  // namespace liese::app
