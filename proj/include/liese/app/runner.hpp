/**
 * @file  runner.hpp
 * @brief Scenario execution: simulation or ingestion, forward filter,
 *        smoother, error metrics, output files and Monte-Carlo batches.
 */
#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "liese/app/config.hpp"
#include "liese/smoother.hpp"

namespace liese::app {

struct SimulatedData {
  std::vector<TruthSample> truth;        ///< epochs 0 .. N
  std::vector<ImuBiasState> truth_bias;  ///< one per truth epoch
  std::vector<ImuSample> imu;            ///< measured, N intervals
  std::vector<GnssFix> gnss;
};

/// Estimation error at one epoch, resolved in the true local-level frame.
struct EpochError {
  double t = 0.0;
  Vec3 pos_n = Vec3::Zero();  ///< estimate minus truth [m]
  Vec3 vel_n = Vec3::Zero();  ///< [m/s]
  Vec3 att_n = Vec3::Zero();  ///< log(C_est C_true^T) [rad]
  double nees = 0.0;          ///< 15-dof normalized error squared
};

struct ErrorStats {
  Vec3 pos_rmse = Vec3::Zero();
  Vec3 vel_rmse = Vec3::Zero();
  Vec3 att_rmse = Vec3::Zero();
  double pos_rmse_3d = 0.0;
};

struct RunOutput {
  std::uint64_t seed = 0;
  SimulatedData data;
  Vec15 initial_error = Vec15::Zero();  ///< in the variant's coordinates
  std::vector<FilterState> filtered;  ///< post-update, one per truth epoch
  std::vector<SmoothedState> smoothed;
  std::vector<EpochError> filtered_err;
  std::vector<EpochError> smoothed_err;
  std::vector<double> nis_t;
  std::vector<double> nis;
  std::size_t gate_rejections = 0;
  ErrorStats filtered_stats;
  ErrorStats smoothed_stats;
};

/// Draws (or returns) the initial error as an additive error resolved in
/// the variant's frame (see additive_to_variant).
Vec15 initial_error(const ScenarioConfig& cfg, std::mt19937_64& rng);

/// Simulates truth, biases, measured IMU and GNSS fixes.
SimulatedData simulate(const ScenarioConfig& cfg, const ImuBiasState& b0,
                       std::mt19937_64& rng);

/// Reads imu.csv, gnss.csv, truth.csv and truth_bias.csv from dir.
SimulatedData load_inputs(const std::string& dir, const ScenarioConfig& cfg);

/// Runs filter and smoother on the given data starting from an additive
/// initial error against the first truth epoch. The error and the initial
/// covariance cfg.P0() are mapped into the variant's coordinates there.
RunOutput run_filter(const ScenarioConfig& cfg, SimulatedData data,
                     const Vec15& additive_dx0);

/// Complete run: draws the initial error first, then simulates (or
/// ingests) and filters. Deterministic for a given seed.
RunOutput run_once(const ScenarioConfig& cfg, std::uint64_t seed);

/// Epoch errors for a sequence of estimates against the truth.
EpochError epoch_error(const TruthSample& truth, const ImuBiasState& bias,
                       const FullState& est, const Mat15& P,
                       const Variant& v, const EarthModel& E);
ErrorStats error_stats(const std::vector<EpochError>& errs);

/// Threads to use: LIESE_NAV_THREADS if set and positive, else the hardware
/// concurrency, capped by the number of jobs.
unsigned worker_threads(std::size_t jobs);

/**
 * Runs cfg with seeds cfg.seed + i for i in [0, runs) and reduces each run
 * with `reduce` inside the worker. Results are ordered by run index, so the
 * output does not depend on the thread count.
 */
template <class R>
std::vector<R> monte_carlo(const ScenarioConfig& cfg, int runs,
                           const std::function<R(const RunOutput&, int)>& reduce) {
  std::vector<R> results(static_cast<std::size_t>(runs));
  std::vector<std::exception_ptr> errors(results.size());
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next++; i < runs; i = next++) {
      try {
        const RunOutput out = run_once(cfg, cfg.seed + static_cast<std::uint64_t>(i));
        results[static_cast<std::size_t>(i)] = reduce(out, i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const unsigned n = worker_threads(results.size());
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

/// Writes every artifact of a run into dir (created if missing).
/// Throws IoError.
void write_run(const std::string& dir, const ScenarioConfig& cfg,
               const RunOutput& out, const std::string& extra_metrics_json = "");

/// Writes truth.csv, truth_bias.csv, imu.csv and gnss.csv only.
void write_simulation(const std::string& dir, const SimulatedData& data);

/// Metrics document of a run.
std::string metrics_json(const ScenarioConfig& cfg, const RunOutput& out,
                         const std::string& extra_json);

}  // namespace liese::app
