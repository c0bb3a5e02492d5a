/**
 * @file  csv.cpp
 * @brief CSV reading and writing for the run artifacts.
 */
#include "liese/app/csv.hpp"

#include <Eigen/Geometry>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "liese/errors.hpp"

namespace liese::app {

const std::vector<std::string> kImuHeader{"t", "wx", "wy", "wz", "fx", "fy", "fz"};
const std::vector<std::string> kGnssHeader{"t", "x", "y", "z", "sxx", "syy", "szz"};
const std::vector<std::string> kTrajectoryHeader{
    "t", "lat", "lon", "h", "vn", "ve", "vd", "q0", "q1", "q2", "q3"};
const std::vector<std::string> kBiasHeader{"t",   "bgx", "bgy", "bgz",
                                           "bax", "bay", "baz"};

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& s, const std::string& origin,
                  std::size_t line) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw IoError(origin + ":" + std::to_string(line) + ": '" + s +
                  "' is not a number");
  }
  return v;
}

std::vector<std::string> covariance_header() {
  std::vector<std::string> h{"t"};
  for (int r = 0; r < 15; ++r) {
    for (int c = r; c < 15; ++c) {
      h.push_back("p" + std::to_string(r) + "_" + std::to_string(c));
    }
  }
  return h;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

CsvTable parse_csv(const std::string& text, const std::string& origin) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw IoError(origin + ":" + std::to_string(n) + ": expected " +
                    std::to_string(t.header.size()) + " columns, got " +
                    std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& c : cells) row.push_back(parse_cell(c, origin, n));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw IoError(origin + ": missing header");
  return t;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), path);
}

std::string format_csv(const CsvTable& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (i) out += ',';
    out += t.header[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const CsvTable& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << format_csv(t);
  if (!out) throw IoError("write to '" + path + "' failed");
}

void require_header(const CsvTable& t, const std::vector<std::string>& expected,
                    const std::string& what) {
  if (t.header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw IoError(what + ": header must be '" + want + "'");
  }
}

CsvTable imu_table(const std::vector<ImuSample>& imu) {
  CsvTable t{kImuHeader, {}};
  for (const ImuSample& s : imu) {
    t.rows.push_back({s.t, s.omega_ib_b.x(), s.omega_ib_b.y(), s.omega_ib_b.z(),
                      s.f_ib_b.x(), s.f_ib_b.y(), s.f_ib_b.z()});
  }
  return t;
}

std::vector<ImuSample> imu_from_table(const CsvTable& t) {
  require_header(t, kImuHeader, "imu.csv");
  std::vector<ImuSample> out;
  for (const auto& r : t.rows) {
    out.push_back(ImuSample{r[0], Vec3(r[1], r[2], r[3]), Vec3(r[4], r[5], r[6])});
  }
  return out;
}

CsvTable gnss_table(const std::vector<GnssFix>& fixes) {
  CsvTable t{kGnssHeader, {}};
  for (const GnssFix& f : fixes) {
    t.rows.push_back({f.t, f.pos_e.x(), f.pos_e.y(), f.pos_e.z(), f.R_e(0, 0),
                      f.R_e(1, 1), f.R_e(2, 2)});
  }
  return t;
}

std::vector<GnssFix> gnss_from_table(const CsvTable& t, const Vec3& lever_arm_b) {
  require_header(t, kGnssHeader, "gnss.csv");
  std::vector<GnssFix> out;
  for (const auto& r : t.rows) {
    GnssFix f;
    f.t = r[0];
    f.pos_e = Vec3(r[1], r[2], r[3]);
    f.R_e = Vec3(r[4], r[5], r[6]).asDiagonal();
    f.lever_arm_b = lever_arm_b;
    out.push_back(f);
  }
  return out;
}

CsvTable trajectory_table(const std::vector<TrajectoryRow>& rows) {
  CsvTable t{kTrajectoryHeader, {}};
  for (const TrajectoryRow& r : rows) {
    Eigen::Quaterniond q(r.state.C_b_n);
    q.normalize();
    if (q.w() < 0.0) q.coeffs() *= -1.0;
    const NavStateNED& s = r.state;
    t.rows.push_back({r.t, s.geo.lat, s.geo.lon, s.geo.h, s.v_eb_n.x(),
                      s.v_eb_n.y(), s.v_eb_n.z(), q.w(), q.x(), q.y(), q.z()});
  }
  return t;
}

std::vector<TrajectoryRow> trajectory_from_table(const CsvTable& t) {
  require_header(t, kTrajectoryHeader, "trajectory csv");
  std::vector<TrajectoryRow> out;
  for (const auto& r : t.rows) {
    TrajectoryRow row;
    row.t = r[0];
    row.state.geo = Geodetic{r[1], r[2], r[3]};
    row.state.v_eb_n = Vec3(r[4], r[5], r[6]);
    row.state.C_b_n = Eigen::Quaterniond(r[7], r[8], r[9], r[10])
                          .normalized()
                          .toRotationMatrix();
    out.push_back(row);
  }
  return out;
}

CsvTable bias_table(const std::vector<BiasRow>& rows) {
  CsvTable t{kBiasHeader, {}};
  for (const BiasRow& r : rows) {
    t.rows.push_back({r.t, r.bias.b_g.x(), r.bias.b_g.y(), r.bias.b_g.z(),
                      r.bias.b_a.x(), r.bias.b_a.y(), r.bias.b_a.z()});
  }
  return t;
}

std::vector<BiasRow> bias_from_table(const CsvTable& t) {
  require_header(t, kBiasHeader, "truth_bias.csv");
  std::vector<BiasRow> out;
  for (const auto& r : t.rows) {
    out.push_back(BiasRow{r[0], ImuBiasState{Vec3(r[1], r[2], r[3]),
                                             Vec3(r[4], r[5], r[6])}});
  }
  return out;
}

CsvTable covariance_table(const std::vector<CovarianceRow>& rows) {
  CsvTable t{covariance_header(), {}};
  for (const CovarianceRow& r : rows) {
    std::vector<double> row{r.t};
    for (int i = 0; i < 15; ++i) {
      for (int j = i; j < 15; ++j) row.push_back(r.P(i, j));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<CovarianceRow> covariance_from_table(const CsvTable& t) {
  require_header(t, covariance_header(), "filtered_cov.csv");
  std::vector<CovarianceRow> out;
  for (const auto& r : t.rows) {
    CovarianceRow row;
    row.t = r[0];
    std::size_t k = 1;
    for (int i = 0; i < 15; ++i) {
      for (int j = i; j < 15; ++j) {
        row.P(i, j) = r[k];
        row.P(j, i) = r[k];
        ++k;
      }
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace liese::app
