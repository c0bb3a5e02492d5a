/**
 * @file  runner.cpp
 * @brief Scenario execution and artifact writing.
 */
#include "liese/app/runner.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "liese/app/csv.hpp"
#include "liese/errors.hpp"

namespace liese::app {

using nlohmann::json;

namespace {

FullState truth_state(const SimulatedData& d, std::size_t k, Frame f,
                      const EarthModel& E) {
  return FullState{represent(d.truth[k].state, f, E), d.truth_bias[k]};
}

bool same_time(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a));
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json stats_json(const ErrorStats& s) {
  return json{{"position_rmse_m", vec_json(s.pos_rmse)},
              {"position_rmse_3d_m", s.pos_rmse_3d},
              {"velocity_rmse_m_s", vec_json(s.vel_rmse)},
              {"attitude_rmse_rad", vec_json(s.att_rmse)}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

}  // namespace

Vec15 initial_error(const ScenarioConfig& cfg, std::mt19937_64& rng) {
  switch (cfg.initial_error) {
    case InitialError::Zero: return Vec15::Zero();
    case InitialError::Explicit: return cfg.explicit_error;
    case InitialError::Sampled: break;
  }
  std::normal_distribution<double> n01(0.0, 1.0);
  Vec15 dx;
  for (int i = 0; i < 15; ++i) dx(i) = cfg.initial_sigma(i) * n01(rng);
  return dx;
}

SimulatedData simulate(const ScenarioConfig& cfg, const ImuBiasState& b0,
                       std::mt19937_64& rng) {
  const EarthModel E = cfg.earth();
  const TrajectorySpec& spec = cfg.trajectory;
  SimulatedData d;
  d.truth = generate_truth(spec, E);
  const std::vector<ImuSample> exact = synthesize_imu(spec, E);
  d.truth_bias.reserve(d.truth.size());
  d.truth_bias.push_back(b0);
  d.imu.reserve(exact.size());
  for (std::size_t k = 0; k < exact.size(); ++k) {
    const ImuBiasState& b = d.truth_bias.back();
    d.imu.push_back(corrupt(exact[k], b, cfg.imu_noise, spec.imu_dt, rng));
    d.truth_bias.push_back(sample_bias_step(b, cfg.imu_noise, spec.imu_dt, rng));
  }
  d.gnss = sample_gnss(d.truth, cfg.lever_arm_b_m, cfg.gnss_R(),
                       gnss_stride(spec), rng, E);
  return d;
}

SimulatedData load_inputs(const std::string& dir, const ScenarioConfig& cfg) {
  const std::string base = dir + "/";
  SimulatedData d;
  d.imu = imu_from_table(read_csv(base + "imu.csv"));
  d.gnss = gnss_from_table(read_csv(base + "gnss.csv"), cfg.lever_arm_b_m);
  for (const TrajectoryRow& r : trajectory_from_table(read_csv(base + "truth.csv"))) {
    d.truth.push_back(TruthSample{r.t, r.state});
  }
  for (const BiasRow& r : bias_from_table(read_csv(base + "truth_bias.csv"))) {
    d.truth_bias.push_back(r.bias);
  }
  if (d.truth.size() != d.imu.size() + 1 ||
      d.truth_bias.size() != d.truth.size()) {
    throw IoError("input files in '" + dir +
                  "' disagree: truth and truth_bias need one row more than imu");
  }
  for (std::size_t k = 0; k < d.imu.size(); ++k) {
    if (!same_time(d.imu[k].t, d.truth[k].t)) {
      throw IoError("imu.csv and truth.csv times differ at row " +
                    std::to_string(k));
    }
  }
  return d;
}

EpochError epoch_error(const TruthSample& truth, const ImuBiasState& bias,
                       const FullState& est, const Mat15& P, const Variant& v,
                       const EarthModel& E) {
  const NavStateECEF te = to_ecef(truth.state, E);
  const NavStateECEF ee = nav_to_ecef(est.nav, VelocityConvention::EarthRelative, E);
  const Mat3 Cen = C_e_n(truth.state.geo);
  EpochError e;
  e.t = truth.t;
  e.pos_n = Cen * (ee.r - te.r);
  e.vel_n = Cen * (ee.v - te.v);
  e.att_n = Cen * so3_log(ee.C_b_e * te.C_b_e.transpose());
  const FullState tf{represent(truth.state, v.frame, E), bias};
  const Vec15 dx = error_between(tf, est, v, E);
  e.nees = dx.dot(Eigen::LDLT<Mat15>(P).solve(dx));
  return e;
}

ErrorStats error_stats(const std::vector<EpochError>& errs) {
  ErrorStats s;
  if (errs.empty()) return s;
  for (const EpochError& e : errs) {
    s.pos_rmse += e.pos_n.cwiseAbs2();
    s.vel_rmse += e.vel_n.cwiseAbs2();
    s.att_rmse += e.att_n.cwiseAbs2();
  }
  const double n = static_cast<double>(errs.size());
  s.pos_rmse = (s.pos_rmse / n).cwiseSqrt();
  s.vel_rmse = (s.vel_rmse / n).cwiseSqrt();
  s.att_rmse = (s.att_rmse / n).cwiseSqrt();
  s.pos_rmse_3d = s.pos_rmse.norm();
  return s;
}

RunOutput run_filter(const ScenarioConfig& cfg, SimulatedData data,
                     const Vec15& additive_dx0) {
  const EarthModel E = cfg.earth();
  const FilterModel model = cfg.filter_model();
  const Variant& v = cfg.variant;
  require_supported(v);
  if (data.truth.empty()) throw ConfigError("empty truth sequence");

  RunOutput out;
  FilterState fs;
  fs.variant = v;
  fs.t = data.truth[0].t;
  const FullState truth0 = truth_state(data, 0, v.frame, E);
  fs.nominal = subtract_additive(truth0, additive_dx0, v.frame, E);
  const Mat15 J = additive_to_variant(fs.nominal, v, E);
  fs.P = symmetrize(Mat15(J * cfg.P0() * J.transpose()));
  out.initial_error = error_between(truth0, fs.nominal, v, E);

  const std::size_t n = data.imu.size();
  std::vector<ForwardRecord> records;
  records.reserve(n + 1);
  out.filtered.reserve(n + 1);
  out.filtered.push_back(fs);
  std::size_t next_fix = 0;
  while (next_fix < data.gnss.size() && data.gnss[next_fix].t <= fs.t) ++next_fix;

  for (std::size_t k = 0; k < n; ++k) {
    const double dt = (k + 1 < n) ? data.imu[k + 1].t - data.imu[k].t
                                  : cfg.trajectory.imu_dt;
    ForwardRecord rec;
    rec.t = fs.t;
    rec.nominal = fs.nominal;
    rec.P_post = fs.P;
    FilterState pred = predict(fs, data.imu[k], dt, model, &rec.Phi);
    pred.t = data.truth[k + 1].t;
    rec.nominal_pred = pred.nominal;
    rec.P_pred = pred.P;
    records.push_back(std::move(rec));
    fs = pred;
    while (next_fix < data.gnss.size() && same_time(data.gnss[next_fix].t, fs.t)) {
      try {
        UpdateReport rep;
        fs = update(fs, data.gnss[next_fix], cfg.mode, model, &rep);
        out.nis_t.push_back(fs.t);
        out.nis.push_back(rep.nis);
      } catch (const InnovationGateExceeded&) {
        ++out.gate_rejections;
      }
      ++next_fix;
    }
    out.filtered.push_back(fs);
  }
  ForwardRecord last;
  last.t = fs.t;
  last.nominal = fs.nominal;
  last.P_post = fs.P;
  last.nominal_pred = fs.nominal;
  last.P_pred = fs.P;
  records.push_back(std::move(last));

  out.filtered_err.reserve(out.filtered.size());
  for (std::size_t k = 0; k < out.filtered.size(); ++k) {
    out.filtered_err.push_back(epoch_error(data.truth[k], data.truth_bias[k],
                                           out.filtered[k].nominal,
                                           out.filtered[k].P, v, E));
  }
  out.filtered_stats = error_stats(out.filtered_err);
  if (cfg.smoother) {
    out.smoothed = rts_smooth(records, v, E);
    out.smoothed_err.reserve(out.smoothed.size());
    for (std::size_t k = 0; k < out.smoothed.size(); ++k) {
      out.smoothed_err.push_back(epoch_error(data.truth[k], data.truth_bias[k],
                                             out.smoothed[k].nominal,
                                             out.smoothed[k].P, v, E));
    }
    out.smoothed_stats = error_stats(out.smoothed_err);
  }
  out.data = std::move(data);
  return out;
}

RunOutput run_once(const ScenarioConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Vec15 dx0 = initial_error(cfg, rng);
  SimulatedData data;
  if (cfg.input_dir.empty()) {
    const ImuBiasState b0{dx0.segment<3>(kBg), dx0.segment<3>(kBa)};
    data = simulate(cfg, b0, rng);
  } else {
    data = load_inputs(cfg.input_dir, cfg);
  }
  RunOutput out = run_filter(cfg, std::move(data), dx0);
  out.seed = seed;
  return out;
}

unsigned worker_threads(std::size_t jobs) {
  unsigned n = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("LIESE_NAV_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) n = static_cast<unsigned>(v);
  }
  if (n == 0) n = 1;
  if (jobs > 0 && n > jobs) n = static_cast<unsigned>(jobs);
  return n;
}

std::string metrics_json(const ScenarioConfig& cfg, const RunOutput& out,
                         const std::string& extra_json) {
  json j;
  j["variant"] = to_string(cfg.variant);
  j["mode"] = to_string(cfg.mode);
  j["seed"] = out.seed;
  j["filtered"] = stats_json(out.filtered_stats);
  if (cfg.smoother) j["smoothed"] = stats_json(out.smoothed_stats);
  j["final_nees"] = out.filtered_err.empty() ? 0.0 : out.filtered_err.back().nees;
  json nis = json::array();
  for (std::size_t i = 0; i < out.nis.size(); ++i) {
    nis.push_back(json{{"t", out.nis_t[i]}, {"nis", out.nis[i]}});
  }
  j["nis"] = nis;
  j["gate_rejections"] = out.gate_rejections;
  if (!extra_json.empty()) j["monte_carlo"] = json::parse(extra_json);
  return j.dump(2) + "\n";
}

void write_simulation(const std::string& dir, const SimulatedData& data) {
  make_dir(dir);
  std::vector<TrajectoryRow> truth;
  std::vector<BiasRow> bias;
  for (std::size_t k = 0; k < data.truth.size(); ++k) {
    truth.push_back(TrajectoryRow{data.truth[k].t, data.truth[k].state});
    bias.push_back(BiasRow{data.truth[k].t, data.truth_bias[k]});
  }
  write_csv(dir + "/truth.csv", trajectory_table(truth));
  write_csv(dir + "/truth_bias.csv", bias_table(bias));
  write_csv(dir + "/imu.csv", imu_table(data.imu));
  write_csv(dir + "/gnss.csv", gnss_table(data.gnss));
}

void write_run(const std::string& dir, const ScenarioConfig& cfg,
               const RunOutput& out, const std::string& extra_metrics_json) {
  write_simulation(dir, out.data);
  const EarthModel E = cfg.earth();
  std::vector<TrajectoryRow> filt;
  std::vector<CovarianceRow> cov;
  std::size_t fix = 0;
  for (std::size_t k = 0; k < out.filtered.size(); ++k) {
    const FilterState& fs = out.filtered[k];
    filt.push_back(TrajectoryRow{fs.t, nav_to_ned(fs.nominal.nav, E)});
    bool at_fix = false;
    while (fix < out.nis_t.size() && out.nis_t[fix] <= fs.t) {
      at_fix = at_fix || same_time(out.nis_t[fix], fs.t);
      ++fix;
    }
    if (k == 0 || at_fix || k + 1 == out.filtered.size()) {
      cov.push_back(CovarianceRow{fs.t, fs.P});
    }
  }
  write_csv(dir + "/filtered.csv", trajectory_table(filt));
  write_csv(dir + "/filtered_cov.csv", covariance_table(cov));
  if (cfg.smoother) {
    std::vector<TrajectoryRow> sm;
    for (const SmoothedState& s : out.smoothed) {
      sm.push_back(TrajectoryRow{s.t, nav_to_ned(s.nominal.nav, E)});
    }
    write_csv(dir + "/smoothed.csv", trajectory_table(sm));
  }
  write_text(dir + "/metrics.json", metrics_json(cfg, out, extra_metrics_json));
  write_text(dir + "/config.json", dump_config(cfg) + "\n");
}

}  // namespace liese::app
