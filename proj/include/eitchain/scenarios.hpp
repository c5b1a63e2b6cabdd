#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eitchain/effective_flow.hpp"
#include "eitchain/grid.hpp"
#include "eitchain/mb_solver.hpp"
#include "eitchain/medium.hpp"

namespace eit {

enum class Engine { MB, Effective, Both };

// How the probe enters the simulation.
//  Vacuum        Gaussian field in vacuum at t = 0.
//  DarkPolariton Pulse already converted into the dark polariton of its layer.
//  Inflow        Vacuum pulse fed through the left boundary of the effective
//                mesh; pulse.center_x0 is its (virtual) position at t = 0.
enum class Launch { Vacuum, DarkPolariton, Inflow };

const char* to_string(Engine e);
Engine engine_from_string(const std::string& s);
const char* to_string(Launch l);
Launch launch_from_string(const std::string& s);
const char* to_string(SlopeLimiter l);
SlopeLimiter limiter_from_string(const std::string& s);

// Conversion between normalized units (omega_p = k_p = c = 1) and SI.
struct PhysicalUnits {
  double omega_p_si = 0.0;  // rad/s, 0 when the scenario is purely normalized

  static PhysicalUnits sodium();
  bool enabled() const { return omega_p_si > 0.0; }
  double length_m() const;
  double time_s() const;
  double from_um(double um) const { return um * 1e-6 / length_m(); }
  double from_us(double us) const { return us * 1e-6 / time_s(); }
  double to_um(double x) const { return x * length_m() * 1e6; }
  double to_us(double t) const { return t * time_s() * 1e6; }
  // Angular rate 2 pi f in units of omega_p.
  double from_hz(double f) const { return 2.0 * 3.141592653589793 * f / omega_p_si; }
};

struct MbSettings {
  double x_min = 0.0;
  double x_max = 0.0;
  double dx = 1.0;
  double dt = 0.0;  // 0: default_time_step
  double sponge_width = 0.0;
  int diag_every = 10;
};

struct EffectiveSettings {
  double x_min = 0.0;
  double x_max = 0.0;
  double dx_vacuum = 1.0;
  double dt = 0.0;
  bool diffusion = true;
  bool muscl = true;
  SlopeLimiter limiter = SlopeLimiter::Minmod;
  std::vector<double> probes;
  int diag_every = 10;
};

struct Scenario {
  std::string name;
  std::string description;
  MediumProfile medium;
  PulseSpec pulse;
  Launch launch = Launch::Vacuum;
  Engine engine = Engine::Both;
  double t_end = 0.0;
  std::vector<double> snapshot_times;
  MbSettings mb;
  EffectiveSettings effective;
  PhysicalUnits units;
  // Lossless-transit claim: the pulse spectrum must fit the EIT window.
  bool claims_lossless = false;
  std::vector<std::string> diagnostics;
  // Parameters the figure captions do not give, with the value adopted.
  std::map<std::string, std::string> assumptions;

  // Throws ConfigError on inconsistent input; returns soft warnings.
  std::vector<std::string> validate() const;
  Grid mb_grid() const;
  EffectiveOptions effective_options() const;
};

std::vector<std::string> preset_names();
Scenario preset(const std::string& name);

// A copy with every length and time multiplied by s, every rate divided by s
// and D divided by s^2, so that group velocities are unchanged.  Compression,
// peak ratios and efficiencies are invariant.
Scenario rescaled(const Scenario& sc, double s);

struct ScenarioRun {
  std::optional<Grid> grid;
  std::optional<RunResult> mb;
  std::optional<EffectiveMesh> mesh;
  std::optional<EffectiveRun> effective;
};

// With failure_dir set, a NumericalFailure leaves the last good state there
// and records its path in the exception.
ScenarioRun run_scenario(const Scenario& sc, Engine engine, const std::string& failure_dir = "");
inline ScenarioRun run_scenario(const Scenario& sc) { return run_scenario(sc, sc.engine); }

struct RampMargin {
  int layer = -1;
  std::size_t segment = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  double margin = 0.0;  // max |dOmega_c/dt| / (D omega_p^2)
  std::optional<double> leakage;
};

// Per-ramp adiabaticity margins.  With with_mb the scenario is run on the MB
// engine and the bright-branch population left after each ramp is measured by
// projecting the state on the instantaneous dark eigenvector.
std::vector<RampMargin> adiabaticity_report(const Scenario& sc, bool with_mb = false);

// Fraction of the (field + coherence) norm inside layer l not carried by the
// local dark eigenvector at time s.t.
double bright_fraction(const FieldState& s, const Grid& g, const MediumProfile& m, int layer);

}  // namespace eit
