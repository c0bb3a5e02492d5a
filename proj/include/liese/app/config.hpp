/**
 * @file  config.hpp
 * @brief Scenario configuration and its strict JSON schema.
 *
 * Every key is optional and falls back to the default below; unknown keys
 * are rejected. Units are part of the key names.
 */
#pragma once

#include <cstdint>
#include <string>

#include "liese/filter.hpp"
#include "liese/simulator.hpp"

namespace liese::app {

enum class InitialError {
  Zero,      ///< nominal equals truth
  Sampled,   ///< error drawn from N(0, P0)
  Explicit,  ///< error given in the variant's coordinates
};

struct ScenarioConfig {
  TrajectorySpec trajectory;
  ImuNoiseParams imu_noise;
  bool gravity_enabled = true;

  Vec3 gnss_sigma_m = Vec3::Constant(1.0);
  Vec3 lever_arm_b_m = Vec3::Zero();

  /// Initial one-sigma of the additive error (attitude, velocity, position,
  /// b_g, b_a) resolved in the variant's frame. The same convention applies
  /// to explicit_error.
  Vec15 initial_sigma = Vec15::Zero();
  InitialError initial_error = InitialError::Sampled;
  Vec15 explicit_error = Vec15::Zero();

  Variant variant{Frame::NED, ErrorDef::LeftEst, false};
  UpdateMode mode = UpdateMode::SE23;
  bool gating = false;
  IntegrationMethod integration = IntegrationMethod::RK4;
  bool smoother = true;

  std::uint64_t seed = 1;
  int monte_carlo_runs = 1;
  std::string output_dir = "out";
  /// When set, imu.csv, gnss.csv, truth.csv and truth_bias.csv are read from
  /// this directory instead of being simulated.
  std::string input_dir;

  Mat15 P0() const;
  Mat3 gnss_R() const;
  EarthModel earth() const;
  FilterModel filter_model() const;
};

/// Defaults: 60 s circle, tactical-grade IMU, 1 m GNSS, NED LeftEst.
ScenarioConfig default_config();

/// Parses a JSON document over the defaults. Throws ConfigError.
ScenarioConfig parse_config(const std::string& json_text);

/// Reads and parses a file. Throws IoError, ConfigError.
ScenarioConfig load_config(const std::string& path);

/// Serializes every field (round-trips through parse_config).
std::string dump_config(const ScenarioConfig& cfg);

UpdateMode parse_mode(const std::string& s);
std::string to_string(UpdateMode m);

}  // namespace liese::app
