#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "eitchain/dispersion.hpp"
#include "eitchain/grid.hpp"
#include "eitchain/medium.hpp"

namespace eit {

// Gaussian amplitude envelope A exp(-(x - x0)^2 / (2 sigma^2)).  For a vacuum
// launch sigma is the vacuum length sigma_x = c sigma_t; for an in-medium dark
// polariton it is the compressed length.
struct PulseSpec {
  double center_x0 = 0.0;
  double sigma = 1.0;
  double amplitude = 1.0;
  double detuning = 0.0;
  int direction = +1;
};

// Envelopes relative to the forward carrier exp(i(k_p x - omega_p t)).
struct FieldState {
  std::vector<cplx> E;
  std::vector<cplx> rho_eg;
  std::vector<cplx> rho_mg;
  double t = 0.0;
  double n_pol0 = 0.0;
};

struct DiagnosticSample {
  double t = 0.0;
  double n_pol = 0.0;
  double x_peak = 0.0;
  double peak = 0.0;
  double w_em = 0.0;
  double w_at = 0.0;
};

struct RunResult {
  std::vector<FieldState> snapshots;
  std::vector<DiagnosticSample> diagnostics;
};

double polariton_number(const FieldState& s, double dx);
// Peak of |E|^2 located by parabolic interpolation around the largest sample.
DiagnosticSample diagnose(const FieldState& s, const Grid& g);

double default_time_step(const MediumProfile& m);
// Carrier wave vector (units of k_p, > 0) of a vacuum wave detuned by delta.
double carrier_wave_vector(const DispersionSubstitute& sub, double delta);

class MbSolver {
 public:
  MbSolver(Grid grid, MediumProfile medium, DispersionSubstitute sub = DispersionSubstitute::erf());
  ~MbSolver();
  MbSolver(const MbSolver&) = delete;
  MbSolver& operator=(const MbSolver&) = delete;

  const Grid& grid() const { return grid_; }
  const MediumProfile& medium() const { return medium_; }
  const DispersionSubstitute& substitute() const { return sub_; }

  FieldState init_state(const PulseSpec& pulse) const;
  // Pulse already converted into the dark polariton of the layer under its
  // centre, at the control field of time t0.
  FieldState init_dark_polariton(const PulseSpec& pulse, double t0 = 0.0) const;

  void check_stability(double dt) const;
  // One Strang step kinetic/local/kinetic.
  void step(FieldState& s, double dt);
  void step(FieldState& s) { step(s, grid_.dt); }

  // Fused stepping.  Snapshots are taken at exactly the requested times.
  // diag_every = 0 disables the scalar series except the first and last rows.
  RunResult run(FieldState s, double t_max, std::span<const double> snapshot_times,
                int diag_every = 10);

  // Called on every synchronised state inside run().
  std::function<void(const FieldState&)> observer;
  // Last state reached before a NumericalFailure.
  const FieldState& failure_state() const { return failure_state_; }

 private:
  void kinetic(FieldState& s, double h);
  void local(FieldState& s, double t_mid, double dt);
  const std::vector<cplx>& phase_for(double h);
  void check_finite(const FieldState& s);

  Grid grid_;
  MediumProfile medium_;
  DispersionSubstitute sub_;
  std::vector<double> omega_q_;
  std::vector<int> cell_layer_;
  std::vector<double> cell_occ_;
  std::vector<double> sponge_;
  struct PhaseCache {
    double h = 0.0;
    std::vector<cplx> phase;
  };
  PhaseCache cache_[2];
  int cache_next_ = 0;
  FieldState failure_state_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

}  // namespace eit
