#pragma once

#include <functional>
#include <span>
#include <vector>

#include "eitchain/dispersion.hpp"
#include "eitchain/medium.hpp"
#include "eitchain/protocol.hpp"

namespace eit {

struct IntensityState {
  std::vector<double> I;
  double t = 0.0;
};

// Finite-volume mesh whose cell widths follow the local light speed: vacuum
// cells are dx_vacuum wide, cells of layer l are dx_vacuum * max_t v_l(t)
// wide (rounded to an integer count per region).  With dt = dx_vacuum every
// cell is advected at Courant number <= 1 and at exactly 1 in vacuum and in
// layers running at their top speed.
struct EffectiveMesh {
  std::vector<double> edges;
  std::vector<double> centers;
  std::vector<double> widths;
  std::vector<int> layer;
  std::size_t size() const { return centers.size(); }
  std::size_t index_of(double x) const;
};

enum class SlopeLimiter { Minmod, MonotonizedCentral, Superbee };

struct EffectiveOptions {
  double x_min = 0.0;
  double x_max = 0.0;
  double dx_vacuum = 1.0;
  // 0 means dt = dx_vacuum.
  double dt = 0.0;
  bool diffusion = true;
  bool muscl = true;
  SlopeLimiter limiter = SlopeLimiter::Minmod;
};

struct IntensityDiagnostic {
  double t = 0.0;
  double content = 0.0;   // sum of (I / v) h
  double integral = 0.0;  // sum of I h
  double x_peak = 0.0;
  double peak = 0.0;
};

struct EffectiveRun {
  std::vector<IntensityState> snapshots;
  std::vector<IntensityDiagnostic> diagnostics;
  // Intensity time traces at the requested probe positions.
  std::vector<double> probe_t;
  std::vector<std::vector<double>> probe_I;
};

class EffectiveSolver {
 public:
  EffectiveSolver(MediumProfile medium, EffectiveOptions opt);

  const EffectiveMesh& mesh() const { return mesh_; }
  const MediumProfile& medium() const { return medium_; }
  const EffectiveOptions& options() const { return opt_; }
  double dt() const { return dt_; }

  // Cell averages of I0 by three-point Gauss quadrature.
  IntensityState init(const std::function<double(double)>& I0, double t0 = 0.0) const;
  // |E|^2 of a Gaussian amplitude envelope of width sigma.
  IntensityState init_gaussian(double x0, double sigma, double amplitude = 1.0, double t0 = 0.0) const;

  double velocity(std::size_t cell, double t) const;
  double diffusivity(std::size_t cell, double t) const;

  // One step: exact source factor, limited upwind advection, explicit
  // conservative diffusion sub-cycled to its stability limit.
  void step(IntensityState& s, double dt);
  void step(IntensityState& s) { step(s, dt_); }

  EffectiveRun run(IntensityState s, double t_max, std::span<const double> snapshot_times,
                   int diag_every = 10, std::span<const double> probes = {});

  IntensityDiagnostic diagnose(const IntensityState& s) const;
  double polariton_content(const IntensityState& s) const;

  std::function<void(const IntensityState&)> observer;
  // Intensity crossing the left boundary at time t; empty means no inflow.
  std::function<double(double)> inflow;

 private:
  void advect(IntensityState& s, double t_mid, double dt);
  void diffuse(IntensityState& s, double t, double dt);
  void check_positive(IntensityState& s) const;

  MediumProfile medium_;
  EffectiveOptions opt_;
  EffectiveMesh mesh_;
  double dt_ = 0.0;
  std::vector<double> flux_, work_;
};

// One step of the continuity equation, for callers that hold the pieces.
void evolve_intensity(EffectiveSolver& solver, IntensityState& s, double dt);

// v(t) of the bulk medium around a vacuum defect [0, L_d].
struct DefectGeometry {
  double L_d = 0.0;
  std::function<double(double)> v;
  // Times where v is not smooth; used as quadrature breakpoints.
  std::vector<double> breakpoints;
  bool long_pulse = false;

  static DefectGeometry from_protocol(double L_d, const ModulationProtocol& p, double coupling_D = 0.0);
};

// Closed-form intensity around a vacuum defect for an initial profile I0
// located in the left bulk at t = 0.
class AnalyticDefect {
 public:
  AnalyticDefect(std::function<double(double)> I0, DefectGeometry geom, double root_tol = 1e-6);
  double operator()(double x, double t) const;
  // Integral of v over [a, b].
  double travel(double a, double b) const;

 private:
  double cumulative(double t) const;
  std::function<double(double)> I0_;
  DefectGeometry geom_;
  double tol_;
  std::vector<double> knots_;
  std::vector<double> knot_P_;
};

double analytic_defect(const std::function<double(double)>& I0, const DefectGeometry& geom, double x, double t);

double slice_modulation_estimate(double intensity_in, double v_in, double delta_v);
// Relative change (dv / v_i)(T / tau) of a slice leaving during a linear ramp.
double linear_ramp_slice_change(double delta_v, double v_in, double T, double tau);

// l_abs = (v/c D omega_p^2 / gamma_e sigma_t) sigma_bar with sigma_bar = sigma_t v.
double absorption_length(const EitParams& p, double sigma_t);
// The same length in units of sigma_bar.
double absorption_length_ratio(const EitParams& p, double sigma_t);

}  // namespace eit
