#include "eitchain/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "eitchain/error.hpp"
#include "eitchain/io.hpp"

namespace eit {

const char* to_string(Engine e) {
  switch (e) {
    case Engine::MB: return "mb";
    case Engine::Effective: return "effective";
    case Engine::Both: return "both";
  }
  return "?";
}

Engine engine_from_string(const std::string& s) {
  if (s == "mb") return Engine::MB;
  if (s == "effective") return Engine::Effective;
  if (s == "both") return Engine::Both;
  throw ConfigError("unknown engine '" + s + "' (expected mb, effective or both)");
}

const char* to_string(Launch l) {
  switch (l) {
    case Launch::Vacuum: return "vacuum";
    case Launch::DarkPolariton: return "dark_polariton";
    case Launch::Inflow: return "inflow";
  }
  return "?";
}

Launch launch_from_string(const std::string& s) {
  if (s == "vacuum") return Launch::Vacuum;
  if (s == "dark_polariton") return Launch::DarkPolariton;
  if (s == "inflow") return Launch::Inflow;
  throw ConfigError("unknown launch '" + s + "'");
}

const char* to_string(SlopeLimiter l) {
  switch (l) {
    case SlopeLimiter::Minmod: return "minmod";
    case SlopeLimiter::MonotonizedCentral: return "mc";
    case SlopeLimiter::Superbee: return "superbee";
  }
  return "?";
}

SlopeLimiter limiter_from_string(const std::string& s) {
  if (s == "minmod") return SlopeLimiter::Minmod;
  if (s == "mc") return SlopeLimiter::MonotonizedCentral;
  if (s == "superbee") return SlopeLimiter::Superbee;
  throw ConfigError("unknown limiter '" + s + "'");
}

PhysicalUnits PhysicalUnits::sodium() { return {2.0 * 3.141592653589793 * 508e12}; }

double PhysicalUnits::length_m() const { return 299792458.0 / omega_p_si; }
double PhysicalUnits::time_s() const { return 1.0 / omega_p_si; }

std::vector<std::string> Scenario::validate() const {
  std::vector<std::string> warn;
  medium.validate();
  if (!(t_end > 0.0)) throw ConfigError(name + ": t_end must be > 0");
  if (!(pulse.sigma > 0.0)) throw ConfigError(name + ": pulse sigma must be > 0");
  if (pulse.direction != 1 && pulse.direction != -1) throw ConfigError(name + ": pulse direction must be +-1");
  if (engine != Engine::Effective) {
    if (launch == Launch::Inflow) throw ConfigError(name + ": inflow launch is only available on the effective engine");
    if (!(mb.x_max > mb.x_min) || !(mb.dx > 0.0)) throw ConfigError(name + ": MB domain is empty");
    if (mb.dt < 0.0) throw ConfigError(name + ": MB dt must be >= 0");
  }
  if (engine != Engine::MB) {
    if (!(effective.x_max > effective.x_min) || !(effective.dx_vacuum > 0.0))
      throw ConfigError(name + ": effective domain is empty");
    if (effective.dt > effective.dx_vacuum * (1.0 + 1e-12))
      throw CflViolation(name + ": effective dt exceeds the vacuum cell width");
  }
  if (launch == Launch::DarkPolariton) {
    const int l = medium.layer_at(pulse.center_x0);
    if (l < 0) throw ConfigError(name + ": dark-polariton launch needs the pulse centre inside a layer");
  }
  if (claims_lossless) {
    double sigma_t = pulse.sigma;
    if (launch == Launch::DarkPolariton) sigma_t /= medium.velocity(medium.layer_at(pulse.center_x0), 0.0);
    for (std::size_t l = 0; l < medium.layers.size(); ++l) {
      const Layer& L = medium.layers[l];
      if (L.gamma_e == 0.0) continue;
      const double w = transmission_window(medium.params(static_cast<int>(l), 0.0), L.x_end - L.x_start);
      if (1.0 / sigma_t > w)
        warn.push_back(name + ": pulse bandwidth " + std::to_string(1.0 / sigma_t) + " exceeds the EIT window " +
                       std::to_string(w) + " of " + medium.layer_label(static_cast<int>(l)));
    }
  }
  return warn;
}

Grid Scenario::mb_grid() const {
  const double dt = mb.dt > 0.0 ? mb.dt : default_time_step(medium);
  return Grid::covering(mb.x_min, mb.x_max, mb.dx, dt, mb.sponge_width);
}

EffectiveOptions Scenario::effective_options() const {
  EffectiveOptions o;
  o.x_min = effective.x_min;
  o.x_max = effective.x_max;
  o.dx_vacuum = effective.dx_vacuum;
  o.dt = effective.dt;
  o.diffusion = effective.diffusion;
  o.muscl = effective.muscl;
  o.limiter = effective.limiter;
  return o;
}

namespace {

constexpr double kFig2D = 0.01;
constexpr double kFig2Gamma = 1e-3;
constexpr double kFig2V = 0.11;
constexpr double kFig2SigmaT = 400.0;
constexpr double kFig2Tau = 100.0;

Layer make_layer(double a, double b, double D, double ge, int protocol, std::string name) {
  Layer L;
  L.x_start = a;
  L.x_end = b;
  L.coupling_D = D;
  L.gamma_e = ge;
  L.protocol = protocol;
  L.name = std::move(name);
  return L;
}

Scenario static_interface() {
  Scenario sc;
  sc.name = "static_interface";
  sc.description = "Gaussian pulse crossing a static layer with v_gr = 0.11 c: compression on entry, restoration on exit";
  const double L = 400.0;
  sc.medium.protocols = {ModulationProtocol::constant(ProtocolQuantity::GroupVelocity, kFig2V)};
  sc.medium.layers = {make_layer(0.0, L, kFig2D, kFig2Gamma, 0, "layer")};
  sc.pulse.sigma = kFig2SigmaT;
  sc.pulse.center_x0 = -5.0 * kFig2SigmaT;
  sc.launch = Launch::Vacuum;
  const double t_in = -sc.pulse.center_x0 + 0.5 * L / kFig2V;
  const double t_out = -sc.pulse.center_x0 + L / kFig2V;
  sc.t_end = t_out + 5.0 * kFig2SigmaT;
  sc.snapshot_times = {0.0, -sc.pulse.center_x0, t_in, sc.t_end};
  sc.mb = {-4500.0, 4700.0, 1.0, 0.5, 400.0, 10};
  sc.effective.x_min = -4500.0;
  sc.effective.x_max = 4700.0;
  sc.effective.probes = {-100.0, L + 100.0};
  sc.claims_lossless = true;
  sc.diagnostics = {"compression", "delay", "peak_ratio"};
  sc.assumptions["layer_length"] = "400 (caption shows a half-space; a finite layer lets the pulse exit)";
  sc.assumptions["omega_c"] = "from the caption v_gr through Omega = 2 sqrt(D v / (1 - v))";
  return sc;
}

Scenario homogeneous_ramp() {
  Scenario sc;
  sc.name = "homogeneous_ramp";
  sc.description = "Dark polariton inside a homogeneous layer; slow-down ramp v -> v/2 over omega_p tau = 100";
  const double v = kFig2V;
  sc.medium.protocols = {ModulationProtocol::single_ramp(ProtocolQuantity::GroupVelocity, v, 0.5 * v, 300.0,
                                                         kFig2Tau, RampShape::RaisedCosine)};
  sc.medium.layers = {make_layer(-4000.0, 4000.0, kFig2D, kFig2Gamma, 0, "layer")};
  sc.pulse.sigma = kFig2SigmaT * v;
  sc.pulse.center_x0 = -300.0;
  sc.launch = Launch::DarkPolariton;
  sc.t_end = 1500.0;
  sc.snapshot_times = {0.0, 300.0, 400.0, 1500.0};
  sc.mb = {-1024.0, 1024.0, 0.5, 0.0, 0.0, 10};
  sc.effective.x_min = -1024.0;
  sc.effective.x_max = 1024.0;
  sc.effective.dx_vacuum = 1.0;
  sc.claims_lossless = true;
  sc.diagnostics = {"peak_ratio", "adiabaticity"};
  sc.assumptions["ramp_start"] = "omega_p t = 300";
  return sc;
}

Scenario exit_ramp() {
  Scenario sc;
  sc.name = "exit_ramp";
  sc.description = "Dark polariton leaving a layer into vacuum while the layer is slowed to v/2";
  const double v = kFig2V;
  const double x0 = -250.0;
  const double t_ramp = -x0 / v;
  sc.medium.protocols = {ModulationProtocol::single_ramp(ProtocolQuantity::GroupVelocity, v, 0.5 * v, t_ramp,
                                                         kFig2Tau, RampShape::RaisedCosine)};
  sc.medium.layers = {make_layer(-6000.0, 0.0, kFig2D, kFig2Gamma, 0, "layer")};
  sc.pulse.sigma = kFig2SigmaT * v;
  sc.pulse.center_x0 = x0;
  sc.launch = Launch::DarkPolariton;
  sc.t_end = t_ramp + 4.0 * sc.pulse.sigma / (0.5 * v) + 400.0;
  sc.snapshot_times = {0.0, t_ramp, sc.t_end};
  sc.mb = {-1500.0, 4800.0, 1.0, 0.0, 300.0, 10};
  sc.effective.x_min = -1500.0;
  sc.effective.x_max = 4800.0;
  sc.claims_lossless = true;
  sc.diagnostics = {"peak_ratio"};
  sc.assumptions["ramp_start"] = "when the pulse centre reaches the exit face";
  return sc;
}

Scenario vacuum_defect() {
  Scenario sc;
  sc.name = "vacuum_defect";
  sc.description = "Vacuum defect between two EIT bulks; double ramp v+ = 0.11 c -> v- = 0.02 c -> v+";
  const double vp = 0.11, vm = 0.02, Ld = 6400.0, sb = 1600.0, tau = 100.0, ts = 60000.0;
  const double x0 = -6400.0;
  // Slow down when the defect is half filled with light that left the left bulk.
  const double t1 = (-x0 + 0.5 * Ld * vp) / vp;
  const double t2 = t1 + tau + ts;
  sc.medium.protocols = {
      ModulationProtocol::double_ramp(ProtocolQuantity::GroupVelocity, vp, vm, t1, tau, ts, RampShape::RaisedCosine)};
  sc.medium.layers = {make_layer(-13000.0, 0.0, kFig2D, kFig2Gamma, 0, "left bulk"),
                      make_layer(Ld, 14600.0, kFig2D, kFig2Gamma, 0, "right bulk")};
  sc.pulse.sigma = sb;
  sc.pulse.center_x0 = x0;
  sc.launch = Launch::DarkPolariton;
  sc.t_end = t2 + tau + Ld + 300.0;
  sc.snapshot_times = {0.0, t1 + tau, t1 + tau + 0.5 * ts, t2 + tau, sc.t_end};
  sc.mb = {-13000.0, 14600.0, 1.0, 1.0, 0.0, 100};
  sc.effective.x_min = -13000.0;
  sc.effective.x_max = 14600.0;
  sc.effective.dx_vacuum = 10.0;
  sc.effective.diag_every = 100;
  sc.diagnostics = {"hole_width", "peak_width"};
  sc.assumptions["coupling_D"] = "0.01 (Fig. 2 family)";
  sc.assumptions["ramp_start"] = "defect half filled: t1 = (L_d v+/2 - x0) / v+";
  sc.assumptions["mb_dt"] = "1.0 (splitting error negligible for this smooth dark polariton)";
  return sc;
}

Scenario storage_single_layer() {
  Scenario sc;
  sc.name = "storage_single_layer";
  sc.description = "Light storage in a thin layer: Omega_c 0.07 -> 0 -> 0.07, storage time 1350";
  const double sigma = 540.0, L = 10.0, tau = 100.0, ts = 1350.0;
  const double x0 = -4.0 * sigma;
  const double t1 = -x0;
  sc.medium.protocols = {
      ModulationProtocol::double_ramp(ProtocolQuantity::ControlRabi, 0.07, 0.0, t1, tau, ts, RampShape::RaisedCosine)};
  sc.medium.layers = {make_layer(0.0, L, kFig2D, 0.0, 0, "defect")};
  sc.pulse.sigma = sigma;
  sc.pulse.center_x0 = x0;
  sc.launch = Launch::Vacuum;
  const double t2 = t1 + tau + ts;
  sc.t_end = t2 + tau + 2500.0;
  sc.snapshot_times = {0.0, t1 + tau, t1 + tau + 0.5 * ts, sc.t_end};
  sc.mb = {-8192.0, 8192.0, 1.0, 0.5, 0.0, 10};
  sc.engine = Engine::MB;
  sc.effective.x_min = -8192.0;
  sc.effective.x_max = 8192.0;
  sc.diagnostics = {"retrieval_efficiency"};
  sc.assumptions["coupling_D"] = "0.01 (not in the caption; Fig. 2 family)";
  sc.assumptions["ramp_start"] = "pulse peak at the layer";
  return sc;
}

struct SodiumChain {
  std::string name, description;
  double v;
  double length_um;
  double gap_um;
  int layers;
  double sigma_t_us;
  double dv_rel;
  double tau_us;
  double store_us;  // < 0: single ramp
};

Scenario sodium(const SodiumChain& c) {
  const PhysicalUnits u = PhysicalUnits::sodium();
  Scenario sc;
  sc.name = c.name;
  sc.description = c.description;
  sc.units = u;
  const double D = 3e-9, ge = u.from_hz(10e6);
  const double L = u.from_um(c.length_um), gap = u.from_um(c.gap_um);
  const double sigma = u.from_us(c.sigma_t_us), tau = u.from_us(c.tau_us);
  const double t_ramp = 5.0 * sigma;
  const double v_lo = c.v * (1.0 + c.dv_rel);
  if (c.store_us >= 0.0)
    sc.medium.protocols = {ModulationProtocol::double_ramp(ProtocolQuantity::GroupVelocity, c.v, v_lo, t_ramp, tau,
                                                           u.from_us(c.store_us), RampShape::RaisedCosine)};
  else
    sc.medium.protocols = {
        ModulationProtocol::single_ramp(ProtocolQuantity::GroupVelocity, c.v, v_lo, t_ramp, tau, RampShape::RaisedCosine)};
  double x = 0.0;
  for (int k = 0; k < c.layers; ++k) {
    sc.medium.layers.push_back(make_layer(x, x + L, D, ge, 0, "layer " + std::to_string(k + 1)));
    x += L + gap;
  }
  const double x_end = sc.medium.layers.back().x_end;
  sc.pulse.sigma = sigma;
  sc.pulse.center_x0 = -t_ramp;
  sc.launch = Launch::Inflow;
  sc.engine = Engine::Effective;
  const double dt = tau / 50.0;
  const double transit = x_end + c.layers * L / v_lo;
  sc.t_end = t_ramp + transit + 6.0 * sigma + (c.store_us > 0.0 ? u.from_us(c.store_us) + 2.0 * tau : 0.0);
  sc.snapshot_times = {t_ramp, sc.t_end};
  sc.effective.dx_vacuum = dt;
  sc.effective.x_min = -10.0 * dt;
  sc.effective.x_max = x_end + 20.0 * dt;
  sc.effective.probes = {-5.0 * dt, x_end + 10.0 * dt};
  sc.effective.diag_every = 100;
  sc.mb.x_min = sc.effective.x_min;
  sc.mb.x_max = sc.effective.x_max;
  sc.diagnostics = {"delay", "output_trace"};
  sc.assumptions["coupling_D"] = "3e-9 (Na D2 line)";
  sc.assumptions["gamma_e"] = "2 pi 10 MHz";
  sc.assumptions["ramp_start"] = "pulse peak at the first layer entrance";
  sc.assumptions["gaps"] = "vacuum gaps on coarse exact-translation cells (Courant 1)";
  if (c.layers > 2) sc.assumptions["spacing"] = "uniform";
  return sc;
}

const std::vector<std::string> kNames = {"static_interface",     "homogeneous_ramp",    "exit_ramp",
                                         "vacuum_defect",        "storage_single_layer", "sodium_single_layer",
                                         "sodium_double_layer",  "sodium_four_layer"};

}  // namespace

std::vector<std::string> preset_names() { return kNames; }

Scenario preset(const std::string& name) {
  if (name == "static_interface") return static_interface();
  if (name == "homogeneous_ramp") return homogeneous_ramp();
  if (name == "exit_ramp") return exit_ramp();
  if (name == "vacuum_defect") return vacuum_defect();
  if (name == "storage_single_layer") return storage_single_layer();
  if (name == "sodium_single_layer")
    return sodium({name, "Single 200 um Na layer, double ramp v+/v- = 10", 1e-7, 200.0, 0.0, 1, 10.0, -0.9, 3.5, 8.0});
  if (name == "sodium_double_layer")
    return sodium({name, "Two 30 um Na layers 30 m apart, slow-down ramp dv = -0.5 v", 5e-7, 30.0, 3e7, 2, 1.0, -0.5,
                   0.05, -1.0});
  if (name == "sodium_four_layer")
    return sodium({name, "Four 30 um Na layers 60 m apart, slow-down ramp dv = -0.7 v", 5e-7, 30.0, 6e7, 4, 1.0, -0.7,
                   0.05, -1.0});
  throw UnknownPreset("unknown preset '" + name + "'");
}

Scenario rescaled(const Scenario& sc, double s) {
  if (!(s > 0.0)) throw ConfigError("rescaled: factor must be > 0");
  Scenario r = sc;
  r.name = sc.name + "_x" + std::to_string(s);
  for (auto& L : r.medium.layers) {
    L.x_start *= s;
    L.x_end *= s;
    L.coupling_D /= s * s;
    L.gamma_e /= s;
    L.gamma_m /= s;
    L.delta_e /= s;
    L.delta_R /= s;
  }
  r.medium.interface_smoothing *= s;
  for (auto& p : r.medium.protocols)
    for (auto& seg : p.segments) {
      seg.t_start *= s;
      seg.t_end *= s;
      if (p.quantity == ProtocolQuantity::ControlRabi) {
        seg.start /= s;
        seg.end /= s;
      }
    }
  r.pulse.center_x0 *= s;
  r.pulse.sigma *= s;
  r.pulse.detuning /= s;
  r.t_end *= s;
  for (double& t : r.snapshot_times) t *= s;
  r.mb.x_min *= s;
  r.mb.x_max *= s;
  r.mb.dx *= s;
  r.mb.dt *= s;
  r.mb.sponge_width *= s;
  r.effective.x_min *= s;
  r.effective.x_max *= s;
  r.effective.dx_vacuum *= s;
  r.effective.dt *= s;
  for (double& x : r.effective.probes) x *= s;
  return r;
}

ScenarioRun run_scenario(const Scenario& sc, Engine engine, const std::string& failure_dir) {
  sc.validate();
  ScenarioRun out;
  if (engine != Engine::Effective) {
    if (sc.launch == Launch::Inflow) throw ConfigError(sc.name + ": the MB engine cannot run an inflow launch");
    const Grid g = sc.mb_grid();
    MbSolver solver(g, sc.medium);
    solver.check_stability(g.dt);
    FieldState s0 = sc.launch == Launch::Vacuum ? solver.init_state(sc.pulse) : solver.init_dark_polariton(sc.pulse);
    out.grid = g;
    try {
      out.mb = solver.run(std::move(s0), sc.t_end, sc.snapshot_times, sc.mb.diag_every);
    } catch (NumericalFailure& e) {
      if (!failure_dir.empty()) {
        e.snapshot_path = failure_dir + "/mb_failure_snapshot.txt";
        write_table(e.snapshot_path, {{"scenario", sc.name}, {"t", solver.failure_state().t}},
                    snapshot_table(solver.failure_state(), g), OutputFormat::Text);
      }
      throw;
    }
  }
  if (engine != Engine::MB) {
    EffectiveSolver solver(sc.medium, sc.effective_options());
    IntensityState s0;
    if (sc.launch == Launch::Inflow) {
      s0.I.assign(solver.mesh().size(), 0.0);
      const double x_in = sc.effective.x_min, x0 = sc.pulse.center_x0, sg = sc.pulse.sigma;
      const double a2 = sc.pulse.amplitude * sc.pulse.amplitude;
      solver.inflow = [=](double t) {
        const double u = (x_in - t - x0) / sg;
        return a2 * std::exp(-u * u);
      };
    } else {
      s0 = solver.init_gaussian(sc.pulse.center_x0, sc.pulse.sigma, sc.pulse.amplitude);
    }
    out.mesh = solver.mesh();
    IntensityState last = s0;
    if (!failure_dir.empty()) solver.observer = [&last](const IntensityState& s) { last = s; };
    try {
      out.effective = solver.run(std::move(s0), sc.t_end, sc.snapshot_times, sc.effective.diag_every,
                                 sc.effective.probes);
    } catch (NumericalFailure& e) {
      if (!failure_dir.empty()) {
        e.snapshot_path = failure_dir + "/effective_failure_snapshot.txt";
        write_table(e.snapshot_path, {{"scenario", sc.name}, {"t", last.t}},
                    snapshot_table(last, solver.mesh(), sc.medium), OutputFormat::Text);
      }
      throw;
    }
  }
  return out;
}

double bright_fraction(const FieldState& s, const Grid& g, const MediumProfile& m, int layer) {
  const Layer& L = m.layers.at(layer);
  const double a = 0.5 * m.control(layer, s.t), c = std::sqrt(L.coupling_D);
  const double nrm = std::hypot(a, c);
  if (nrm == 0.0) return 0.0;
  double total = 0.0, dark = 0.0;
  for (std::size_t i = 0; i < g.n_points; ++i) {
    const double x = g.x(i);
    if (x < L.x_start || x >= L.x_end) continue;
    total += std::norm(s.E[i]) + std::norm(s.rho_eg[i]) + std::norm(s.rho_mg[i]);
    dark += std::norm((a * s.E[i] + c * s.rho_mg[i]) / nrm);
  }
  return total > 0.0 ? std::max(0.0, 1.0 - dark / total) : 0.0;
}

std::vector<RampMargin> adiabaticity_report(const Scenario& sc, bool with_mb) {
  sc.validate();
  std::vector<RampMargin> out;
  for (std::size_t l = 0; l < sc.medium.layers.size(); ++l) {
    const int li = static_cast<int>(l);
    const auto& p = sc.medium.protocols.at(sc.medium.layers[l].protocol);
    for (std::size_t k = 0; k < p.segments.size(); ++k) {
      const Segment& seg = p.segments[k];
      RampMargin r;
      r.layer = li;
      r.segment = k;
      r.t_start = seg.t_start;
      r.t_end = seg.t_end;
      if (seg.shape != RampShape::Hold && seg.start != seg.end) {
        double rate = 0.0;
        const int n = 400;
        for (int j = 0; j <= n; ++j) {
          const double t = seg.t_start + (seg.t_end - seg.t_start) * j / n;
          rate = std::max(rate, std::abs(sc.medium.control_rate(li, t)));
        }
        r.margin = adiabaticity_margin(rate, sc.medium.params(li, seg.t_start));
      }
      out.push_back(r);
    }
  }
  if (!with_mb || out.empty()) return out;

  std::vector<double> times;
  for (const auto& r : out) {
    times.push_back(r.t_start);
    times.push_back(r.t_end);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  const double t_stop = std::min(sc.t_end, times.back());
  const Grid g = sc.mb_grid();
  MbSolver solver(g, sc.medium);
  FieldState s0 = sc.launch == Launch::Vacuum ? solver.init_state(sc.pulse) : solver.init_dark_polariton(sc.pulse);
  std::vector<double> snaps;
  for (double t : times)
    if (t > 0.0 && t < t_stop) snaps.push_back(t);
  const RunResult rr = solver.run(std::move(s0), t_stop, snaps, 0);
  auto at = [&](double t) -> const FieldState* {
    for (const auto& s : rr.snapshots)
      if (std::abs(s.t - t) < 1e-9 * std::max(1.0, t)) return &s;
    return nullptr;
  };
  for (auto& r : out) {
    if (r.margin == 0.0) {
      r.leakage = 0.0;
      continue;
    }
    const FieldState* a = at(r.t_start);
    const FieldState* b = at(r.t_end);
    if (!b) continue;
    const double before = a ? bright_fraction(*a, g, sc.medium, r.layer) : 0.0;
    r.leakage = std::max(0.0, bright_fraction(*b, g, sc.medium, r.layer) - before);
  }
  return out;
}

}  // namespace eit
