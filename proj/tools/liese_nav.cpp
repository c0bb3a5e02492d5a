/**
 * @file  liese_nav.cpp
 * @brief Command-line scenario runner: run, simulate and compare.
 *
 * Exit codes: 0 success, 1 runtime failure (including compare FAIL and
 * rejected fixes when gating is on), 2 configuration or usage error,
 * 3 input/output error.
 */
#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "liese/app/compare.hpp"
#include "liese/app/runner.hpp"
#include "liese/errors.hpp"

namespace {

using namespace liese;
using namespace liese::app;

struct RunArgs {
  std::string config;
  std::optional<std::string> variant;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> monte_carlo;
  bool degrees = false;
};

ScenarioConfig resolve(const RunArgs& a) {
  ScenarioConfig cfg = load_config(a.config);
  if (a.variant) {
    try {
      cfg.variant = parse_variant(*a.variant);
      require_supported(cfg.variant);
    } catch (const UnsupportedVariant& e) {
      throw ConfigError(e.what());
    }
  }
  if (a.mode) cfg.mode = parse_mode(*a.mode);
  if (a.seed) cfg.seed = *a.seed;
  if (a.out) cfg.output_dir = *a.out;
  if (a.monte_carlo) {
    if (*a.monte_carlo < 1) throw ConfigError("--monte-carlo must be >= 1");
    cfg.monte_carlo_runs = *a.monte_carlo;
  }
  if (cfg.mode == UpdateMode::Invariant && cfg.variant.error_def != ErrorDef::LeftEst) {
    throw ConfigError("invariant mode requires a LeftEst variant, got " +
                      to_string(cfg.variant));
  }
  return cfg;
}

void print_stats(const char* label, const ErrorStats& s, bool degrees) {
  const double k = degrees ? 180.0 / M_PI : 1.0;
  std::printf("%s position RMSE [m]   : %.6g %.6g %.6g (3D %.6g)\n", label,
              s.pos_rmse.x(), s.pos_rmse.y(), s.pos_rmse.z(), s.pos_rmse_3d);
  std::printf("%s velocity RMSE [m/s] : %.6g %.6g %.6g\n", label,
              s.vel_rmse.x(), s.vel_rmse.y(), s.vel_rmse.z());
  std::printf("%s attitude RMSE [%s] : %.6g %.6g %.6g\n", label,
              degrees ? "deg" : "rad", k * s.att_rmse.x(), k * s.att_rmse.y(),
              k * s.att_rmse.z());
}

struct McSummary {
  std::uint64_t seed;
  double filtered_rmse;
  double smoothed_rmse;
  double final_nees;
  std::vector<double> nees;
};

int cmd_run(const RunArgs& a) {
  const ScenarioConfig cfg = resolve(a);
  const RunOutput first = run_once(cfg, cfg.seed);
  std::string extra;
  if (cfg.monte_carlo_runs > 1) {
    const std::function<McSummary(const RunOutput&, int)> reduce =
        [](const RunOutput& o, int) {
          McSummary s{o.seed, o.filtered_stats.pos_rmse_3d,
                      o.smoothed_stats.pos_rmse_3d,
                      o.filtered_err.back().nees, {}};
          for (const EpochError& e : o.filtered_err) s.nees.push_back(e.nees);
          return s;
        };
    const auto runs = monte_carlo<McSummary>(cfg, cfg.monte_carlo_runs, reduce);
    nlohmann::json mc;
    mc["runs"] = runs.size();
    nlohmann::json per = nlohmann::json::array();
    for (const McSummary& s : runs) {
      per.push_back({{"seed", s.seed},
                     {"filtered_position_rmse_3d_m", s.filtered_rmse},
                     {"smoothed_position_rmse_3d_m", s.smoothed_rmse},
                     {"final_nees", s.final_nees}});
    }
    mc["per_run"] = per;
    nlohmann::json mean = nlohmann::json::array();
    const std::size_t stride = gnss_stride(cfg.trajectory);
    for (std::size_t k = 0; k < runs.front().nees.size(); k += stride) {
      double sum = 0.0;
      for (const McSummary& s : runs) sum += s.nees[k];
      mean.push_back({{"t", first.filtered_err[k].t},
                      {"mean_nees", sum / static_cast<double>(runs.size())}});
    }
    mc["mean_nees"] = mean;
    extra = mc.dump();
  }
  write_run(cfg.output_dir, cfg, first, extra);
  std::printf("variant %s, mode %s, seed %llu, output %s\n",
              to_string(cfg.variant).c_str(), to_string(cfg.mode).c_str(),
              static_cast<unsigned long long>(cfg.seed), cfg.output_dir.c_str());
  print_stats("filtered", first.filtered_stats, a.degrees);
  if (cfg.smoother) print_stats("smoothed", first.smoothed_stats, a.degrees);
  std::printf("final NEES: %.6g\n", first.filtered_err.back().nees);
  if (first.gate_rejections > 0) {
    std::fprintf(stderr, "%zu GNSS fixes rejected by the innovation gate\n",
                 first.gate_rejections);
    return 1;
  }
  return 0;
}

int cmd_simulate(const std::string& config, const std::string& out) {
  ScenarioConfig cfg = load_config(config);
  cfg.output_dir = out;
  std::mt19937_64 rng(cfg.seed);
  const Vec15 dx0 = initial_error(cfg, rng);
  const ImuBiasState b0{dx0.segment<3>(kBg), dx0.segment<3>(kBa)};
  write_simulation(out, simulate(cfg, b0, rng));
  std::printf("simulation written to %s\n", out.c_str());
  return 0;
}

int cmd_compare(const std::string& a, const std::string& b, double pos_tol,
                double cov_tol) {
  const CompareReport r = compare_runs(a, b, pos_tol, cov_tol);
  std::cout << format_report(r, pos_tol, cov_tol);
  return r.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lie-group GNSS/INS error-state filter and smoother"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "simulate or ingest, filter, smooth");
  run->add_option("--config", run_args.config, "scenario JSON")->required();
  run->add_option("--variant", run_args.variant, "e.g. NED_LeftEst");
  run->add_option("--mode", run_args.mode, "invariant or se23");
  run->add_option("--seed", run_args.seed, "random seed");
  run->add_option("--out", run_args.out, "output directory");
  run->add_option("--monte-carlo", run_args.monte_carlo, "number of runs");
  run->add_flag("--degrees", run_args.degrees, "print angles in degrees");

  std::string sim_config, sim_out;
  auto* sim = app.add_subcommand("simulate", "write truth and sensor data only");
  sim->add_option("--config", sim_config, "scenario JSON")->required();
  sim->add_option("--out", sim_out, "output directory")->required();

  std::string dir_a, dir_b;
  double pos_tol = 1e-9, cov_tol = 1e-10;
  auto* cmp = app.add_subcommand("compare", "compare two run directories");
  cmp->add_option("dir_a", dir_a, "first run directory")->required();
  cmp->add_option("dir_b", dir_b, "second run directory")->required();
  cmp->add_option("--pos-tol", pos_tol, "position tolerance [m]");
  cmp->add_option("--cov-tol", cov_tol, "covariance Frobenius tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*sim) return cmd_simulate(sim_config, sim_out);
    if (*cmp) return cmd_compare(dir_a, dir_b, pos_tol, cov_tol);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const UnsupportedVariant& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const IncompatibleMode& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
