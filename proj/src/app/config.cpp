/**
 * @file  config.cpp
 * @brief Strict JSON scenario configuration.
 */
#include "liese/app/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "liese/errors.hpp"

namespace liese::app {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("unknown key '" + where + "." + it.key() + "'");
    }
  }
}

double get_number(const json& obj, const std::string& where,
                  const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) {
    throw ConfigError("'" + where + "." + key + "' must be a number");
  }
  return v.get<double>();
}

bool get_bool(const json& obj, const std::string& where, const std::string& key,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) {
    throw ConfigError("'" + where + "." + key + "' must be a boolean");
  }
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& where,
                       const std::string& key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) {
    throw ConfigError("'" + where + "." + key + "' must be a string");
  }
  return v.get<std::string>();
}

template <int N>
Eigen::Matrix<double, N, 1> get_vector(const json& obj,
                                       const std::string& where,
                                       const std::string& key,
                                       const Eigen::Matrix<double, N, 1>& fb) {
  if (!obj.contains(key)) return fb;
  const json& v = obj.at(key);
  const std::string name = "'" + where + "." + key + "'";
  if (v.is_number()) return Eigen::Matrix<double, N, 1>::Constant(v.get<double>());
  if (!v.is_array() || v.size() != static_cast<std::size_t>(N)) {
    throw ConfigError(name + " must be a number or an array of " +
                      std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) {
    if (!v[i].is_number()) throw ConfigError(name + " must hold numbers");
    out(i) = v[i].get<double>();
  }
  return out;
}

template <class Vec>
json to_array(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

TrajectoryKind parse_kind(const std::string& s) {
  if (s == "stationary") return TrajectoryKind::Stationary;
  if (s == "straight") return TrajectoryKind::StraightConstV;
  if (s == "circle") return TrajectoryKind::Circle;
  if (s == "figure_eight") return TrajectoryKind::FigureEight;
  throw ConfigError("unknown trajectory kind '" + s +
                    "' (stationary, straight, circle, figure_eight)");
}

std::string kind_name(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::Stationary: return "stationary";
    case TrajectoryKind::StraightConstV: return "straight";
    case TrajectoryKind::Circle: return "circle";
    case TrajectoryKind::FigureEight: return "figure_eight";
  }
  return "?";
}

BiasModel parse_bias_model(const std::string& s) {
  if (s == "gauss_markov") return BiasModel::GaussMarkov;
  if (s == "random_constant") return BiasModel::RandomConstant;
  throw ConfigError("unknown bias model '" + s +
                    "' (gauss_markov, random_constant)");
}

InitialError parse_initial(const std::string& s) {
  if (s == "zero") return InitialError::Zero;
  if (s == "sampled") return InitialError::Sampled;
  if (s == "explicit") return InitialError::Explicit;
  throw ConfigError("unknown initial error mode '" + s +
                    "' (zero, sampled, explicit)");
}

std::string initial_name(InitialError e) {
  switch (e) {
    case InitialError::Zero: return "zero";
    case InitialError::Sampled: return "sampled";
    case InitialError::Explicit: return "explicit";
  }
  return "?";
}

IntegrationMethod parse_integration(const std::string& s) {
  if (s == "rk4") return IntegrationMethod::RK4;
  if (s == "euler") return IntegrationMethod::Euler;
  throw ConfigError("unknown integration method '" + s + "' (rk4, euler)");
}

void parse_trajectory(const json& j, TrajectorySpec& t) {
  const std::string w = "trajectory";
  check_keys(j, w,
             {"kind", "radius_m", "speed_m_s", "heading_rad", "scale_m",
              "period_s", "origin", "duration_s", "imu_dt_s", "gnss_dt_s"});
  t.kind = parse_kind(get_string(j, w, "kind", kind_name(t.kind)));
  t.radius = get_number(j, w, "radius_m", t.radius);
  t.speed = get_number(j, w, "speed_m_s", t.speed);
  t.heading = get_number(j, w, "heading_rad", t.heading);
  t.scale = get_number(j, w, "scale_m", t.scale);
  t.period = get_number(j, w, "period_s", t.period);
  t.duration = get_number(j, w, "duration_s", t.duration);
  t.imu_dt = get_number(j, w, "imu_dt_s", t.imu_dt);
  t.gnss_dt = get_number(j, w, "gnss_dt_s", t.gnss_dt);
  if (j.contains("origin")) {
    const json& o = j.at("origin");
    const std::string wo = w + ".origin";
    check_keys(o, wo, {"lat_rad", "lon_rad", "h_m"});
    t.origin.lat = get_number(o, wo, "lat_rad", t.origin.lat);
    t.origin.lon = get_number(o, wo, "lon_rad", t.origin.lon);
    t.origin.h = get_number(o, wo, "h_m", t.origin.h);
  }
}

void parse_noise(const json& j, ImuNoiseParams& p) {
  const std::string w = "imu_noise";
  check_keys(j, w,
             {"sigma_g_rad_s_sqrt_hz", "sigma_a_m_s2_sqrt_hz",
              "sigma_bg_rad_s_sqrt_s", "sigma_ba_m_s2_sqrt_s", "tau_g_s",
              "tau_a_s", "bias_model"});
  p.sigma_g = get_number(j, w, "sigma_g_rad_s_sqrt_hz", p.sigma_g);
  p.sigma_a = get_number(j, w, "sigma_a_m_s2_sqrt_hz", p.sigma_a);
  p.sigma_bg = get_number(j, w, "sigma_bg_rad_s_sqrt_s", p.sigma_bg);
  p.sigma_ba = get_number(j, w, "sigma_ba_m_s2_sqrt_s", p.sigma_ba);
  p.tau_g = get_number(j, w, "tau_g_s", p.tau_g);
  p.tau_a = get_number(j, w, "tau_a_s", p.tau_a);
  if (j.contains("bias_model")) {
    p.bias_model = parse_bias_model(get_string(j, w, "bias_model", ""));
  }
}

void validate(const ScenarioConfig& c) {
  validate(c.trajectory);
  const ImuNoiseParams& p = c.imu_noise;
  if (p.sigma_g < 0 || p.sigma_a < 0 || p.sigma_bg < 0 || p.sigma_ba < 0) {
    throw ConfigError("noise densities must be non-negative");
  }
  if (p.bias_model == BiasModel::GaussMarkov && !(p.tau_g > 0 && p.tau_a > 0)) {
    throw ConfigError("Gauss-Markov correlation times must be positive");
  }
  if ((c.gnss_sigma_m.array() <= 0.0).any()) {
    throw ConfigError("GNSS sigmas must be positive");
  }
  if ((c.initial_sigma.array() < 0.0).any()) {
    throw ConfigError("initial sigmas must be non-negative");
  }
  if (c.monte_carlo_runs < 1) throw ConfigError("monte_carlo_runs must be >= 1");
  require_supported(c.variant);
  if (c.mode == UpdateMode::Invariant && c.variant.error_def != ErrorDef::LeftEst) {
    throw ConfigError("invariant mode requires a LeftEst variant, got " +
                      to_string(c.variant));
  }
}

}  // namespace

Mat15 ScenarioConfig::P0() const {
  return initial_sigma.array().square().matrix().asDiagonal();
}

Mat3 ScenarioConfig::gnss_R() const {
  return gnss_sigma_m.array().square().matrix().asDiagonal();
}

EarthModel ScenarioConfig::earth() const {
  EarthModel E = EarthModel::wgs84();
  E.gravity_enabled = gravity_enabled;
  return E;
}

FilterModel ScenarioConfig::filter_model() const {
  FilterModel m;
  m.noise = imu_noise;
  m.earth = earth();
  m.method = integration;
  m.gating = gating;
  return m;
}

UpdateMode parse_mode(const std::string& s) {
  if (s == "invariant") return UpdateMode::Invariant;
  if (s == "se23") return UpdateMode::SE23;
  throw ConfigError("unknown update mode '" + s + "' (invariant, se23)");
}

std::string to_string(UpdateMode m) {
  return m == UpdateMode::Invariant ? "invariant" : "se23";
}

ScenarioConfig default_config() {
  ScenarioConfig c;
  c.trajectory = TrajectorySpec{};
  c.imu_noise.sigma_g = 1e-4;
  c.imu_noise.sigma_a = 1e-3;
  c.imu_noise.sigma_bg = 1e-6;
  c.imu_noise.sigma_ba = 1e-5;
  c.imu_noise.tau_g = 3600.0;
  c.imu_noise.tau_a = 3600.0;
  c.initial_sigma << Vec3::Constant(0.01), Vec3::Constant(0.1),
      Vec3::Constant(1.0), Vec3::Constant(1e-4), Vec3::Constant(1e-2);
  return c;
}

ScenarioConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  const std::string w = "config";
  check_keys(j, w,
             {"trajectory", "imu_noise", "earth", "gnss", "initial", "filter",
              "seed", "monte_carlo_runs", "output_dir", "input_dir"});
  ScenarioConfig c = default_config();
  if (j.contains("trajectory")) parse_trajectory(j.at("trajectory"), c.trajectory);
  if (j.contains("imu_noise")) parse_noise(j.at("imu_noise"), c.imu_noise);
  if (j.contains("earth")) {
    const json& e = j.at("earth");
    check_keys(e, "earth", {"gravity_enabled"});
    c.gravity_enabled = get_bool(e, "earth", "gravity_enabled", c.gravity_enabled);
  }
  if (j.contains("gnss")) {
    const json& g = j.at("gnss");
    check_keys(g, "gnss", {"sigma_m", "lever_arm_b_m"});
    c.gnss_sigma_m = get_vector<3>(g, "gnss", "sigma_m", c.gnss_sigma_m);
    c.lever_arm_b_m = get_vector<3>(g, "gnss", "lever_arm_b_m", c.lever_arm_b_m);
  }
  if (j.contains("initial")) {
    const json& i = j.at("initial");
    const std::string wi = "initial";
    check_keys(i, wi,
               {"sigma_att_rad", "sigma_vel_m_s", "sigma_pos_m",
                "sigma_bg_rad_s", "sigma_ba_m_s2", "error", "explicit_error"});
    Vec15& s = c.initial_sigma;
    s.segment<3>(kPhi) = get_vector<3>(i, wi, "sigma_att_rad", Vec3(s.segment<3>(kPhi)));
    s.segment<3>(kVel) = get_vector<3>(i, wi, "sigma_vel_m_s", Vec3(s.segment<3>(kVel)));
    s.segment<3>(kPos) = get_vector<3>(i, wi, "sigma_pos_m", Vec3(s.segment<3>(kPos)));
    s.segment<3>(kBg) = get_vector<3>(i, wi, "sigma_bg_rad_s", Vec3(s.segment<3>(kBg)));
    s.segment<3>(kBa) = get_vector<3>(i, wi, "sigma_ba_m_s2", Vec3(s.segment<3>(kBa)));
    if (i.contains("error")) c.initial_error = parse_initial(get_string(i, wi, "error", ""));
    c.explicit_error = get_vector<15>(i, wi, "explicit_error", c.explicit_error);
  }
  if (j.contains("filter")) {
    const json& f = j.at("filter");
    const std::string wf = "filter";
    check_keys(f, wf, {"variant", "mode", "gating", "integration", "smoother"});
    if (f.contains("variant")) {
      try {
        c.variant = parse_variant(get_string(f, wf, "variant", ""));
      } catch (const UnsupportedVariant& e) {
        throw ConfigError(e.what());
      }
    }
    if (f.contains("mode")) c.mode = parse_mode(get_string(f, wf, "mode", ""));
    c.gating = get_bool(f, wf, "gating", c.gating);
    if (f.contains("integration")) {
      c.integration = parse_integration(get_string(f, wf, "integration", ""));
    }
    c.smoother = get_bool(f, wf, "smoother", c.smoother);
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) {
      throw ConfigError("'config.seed' must be a non-negative integer");
    }
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("monte_carlo_runs")) {
    if (!j.at("monte_carlo_runs").is_number_integer()) {
      throw ConfigError("'config.monte_carlo_runs' must be an integer");
    }
    c.monte_carlo_runs = j.at("monte_carlo_runs").get<int>();
  }
  c.output_dir = get_string(j, w, "output_dir", c.output_dir);
  c.input_dir = get_string(j, w, "input_dir", c.input_dir);
  try {
    validate(c);
  } catch (const UnsupportedVariant& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ScenarioConfig& c) {
  const TrajectorySpec& t = c.trajectory;
  const ImuNoiseParams& p = c.imu_noise;
  json j;
  j["trajectory"] = {
      {"kind", kind_name(t.kind)},
      {"radius_m", t.radius},
      {"speed_m_s", t.speed},
      {"heading_rad", t.heading},
      {"scale_m", t.scale},
      {"period_s", t.period},
      {"origin",
       {{"lat_rad", t.origin.lat}, {"lon_rad", t.origin.lon}, {"h_m", t.origin.h}}},
      {"duration_s", t.duration},
      {"imu_dt_s", t.imu_dt},
      {"gnss_dt_s", t.gnss_dt}};
  j["imu_noise"] = {
      {"sigma_g_rad_s_sqrt_hz", p.sigma_g},
      {"sigma_a_m_s2_sqrt_hz", p.sigma_a},
      {"sigma_bg_rad_s_sqrt_s", p.sigma_bg},
      {"sigma_ba_m_s2_sqrt_s", p.sigma_ba},
      {"tau_g_s", p.tau_g},
      {"tau_a_s", p.tau_a},
      {"bias_model", p.bias_model == BiasModel::GaussMarkov ? "gauss_markov"
                                                            : "random_constant"}};
  j["earth"] = {{"gravity_enabled", c.gravity_enabled}};
  j["gnss"] = {{"sigma_m", to_array(c.gnss_sigma_m)},
               {"lever_arm_b_m", to_array(c.lever_arm_b_m)}};
  const Vec15& s = c.initial_sigma;
  j["initial"] = {{"sigma_att_rad", to_array(Vec3(s.segment<3>(kPhi)))},
                  {"sigma_vel_m_s", to_array(Vec3(s.segment<3>(kVel)))},
                  {"sigma_pos_m", to_array(Vec3(s.segment<3>(kPos)))},
                  {"sigma_bg_rad_s", to_array(Vec3(s.segment<3>(kBg)))},
                  {"sigma_ba_m_s2", to_array(Vec3(s.segment<3>(kBa)))},
                  {"error", initial_name(c.initial_error)},
                  {"explicit_error", to_array(c.explicit_error)}};
  j["filter"] = {{"variant", to_string(c.variant)},
                 {"mode", to_string(c.mode)},
                 {"gating", c.gating},
                 {"integration",
                  c.integration == IntegrationMethod::RK4 ? "rk4" : "euler"},
                 {"smoother", c.smoother}};
  j["seed"] = c.seed;
  j["monte_carlo_runs"] = c.monte_carlo_runs;
  j["output_dir"] = c.output_dir;
  j["input_dir"] = c.input_dir;
  return j.dump(2);
}

}  // namespace liese::app
