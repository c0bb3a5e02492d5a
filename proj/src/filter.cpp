/**
 * @file  filter.cpp
 * @brief Error-state EKF prediction and update.
 */
#include "liese/filter.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <string>

#include "liese/errors.hpp"

namespace liese {

Discretization discretize(const Mat15& F, const Mat15x12& G, const Mat12& Qc,
                          double dt) {
  const Mat15 Fdt = F * dt;
  Discretization d;
  d.Phi = Mat15::Identity() + Fdt + 0.5 * Fdt * Fdt;
  const Mat15 GQG = G * Qc * G.transpose();
  d.Qd = symmetrize(Mat15(0.5 * (d.Phi * GQG * d.Phi.transpose() + GQG) * dt));
  return d;
}

FilterState predict(const FilterState& fs, const ImuSample& imu, double dt,
                    const FilterModel& model, Mat15* Phi_out) {
  const ErrorDynamics ed =
      error_dynamics(fs.variant, fs.nominal, imu, model.noise, model.earth);
  const Discretization d =
      discretize(ed.F, ed.G, continuous_noise(model.noise), dt);

  ImuSample corrected = imu;
  corrected.omega_ib_b -= fs.nominal.bias.b_g;
  corrected.f_ib_b -= fs.nominal.bias.b_a;

  FilterState out = fs;
  if (const auto* n = std::get_if<NavStateNED>(&fs.nominal.nav)) {
    out.nominal.nav = step(*n, corrected, dt, model.method, model.earth);
  } else {
    out.nominal.nav = step(std::get<NavStateECEF>(fs.nominal.nav), corrected,
                           dt, model.method, model.earth);
  }
  out.nominal.bias = propagate_bias_mean(fs.nominal.bias, model.noise, dt);
  out.P = symmetrize(Mat15(d.Phi * fs.P * d.Phi.transpose() + d.Qd));
  out.t = fs.t + dt;
  if (Phi_out) *Phi_out = d.Phi;
  return out;
}

FilterState update(const FilterState& fs, const GnssFix& fix, UpdateMode mode,
                   const FilterModel& model, UpdateReport* report) {
  const MeasurementModel m =
      measurement(fs.nominal, fs.variant, fix, mode, model.earth);
  // Right-defined coordinates couple attitude into the Earth-centred position
  // slot, so P spans many decades. The gain and the Joseph product are formed
  // in additive coordinates, where that coupling is absent, and mapped back.
  Mat15 J = Mat15::Identity(), T = Mat15::Identity();
  if (is_right(fs.variant.error_def)) {
    J = additive_to_variant(fs.nominal, fs.variant, model.earth);
    T = variant_to_additive(fs.nominal, fs.variant, model.earth);
  }
  const Mat15 Pa = symmetrize(Mat15(T * fs.P * T.transpose()));
  const Mat3x15 Ha = m.H * J;
  const Mat3 S = symmetrize(Mat3(Ha * Pa * Ha.transpose() + m.R_effective));
  const Eigen::LDLT<Mat3> ldlt(S);
  const Mat15x3 PHt = Pa * Ha.transpose();
  const Mat15x3 Ka = ldlt.solve(PHt.transpose()).transpose();
  const double nis = m.innovation.dot(ldlt.solve(m.innovation));
  if (model.gating && nis > kChi2Gate3) {
    throw InnovationGateExceeded("NIS " + std::to_string(nis) + " at t=" +
                                 std::to_string(fix.t) + " exceeds " +
                                 std::to_string(kChi2Gate3));
  }
  const Mat15x3 K = J * Ka;
  const Vec15 dx = K * m.innovation;
  const Mat15 IKH = Mat15::Identity() - Ka * Ha;
  const Mat15 Pa_post = symmetrize(Mat15(IKH * Pa * IKH.transpose() +
                                         Ka * m.R_effective * Ka.transpose()));

  FilterState out = fs;
  out.P = symmetrize(Mat15(J * Pa_post * J.transpose()));
  out.nominal = apply_correction(fs.nominal, dx, fs.variant, model.earth);
  if (report) {
    report->z = m.innovation;
    report->S = S;
    report->K = K;
    report->nis = nis;
    report->dx = dx;
  }
  return out;
}

}  // namespace liese
