#include "eitchain/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "eitchain/dispersion.hpp"
#include "eitchain/error.hpp"
#include "eitchain/io.hpp"
#include "eitchain/measure.hpp"
#include "eitchain/scenarios.hpp"
#include "eitchain/transmission.hpp"

namespace eit {

namespace fs = std::filesystem;

namespace {

struct RunArgs {
  std::string source;
  std::string engine;
  std::string out = "out";
  std::string format = "text";
  std::string limiter;
  double dx = 0.0;
  double dt = 0.0;
  double smoothing = -1.0;
  int snapshots = 0;
  bool no_diffusion = false;
  bool first_order = false;
};

Scenario resolve(const std::string& source) {
  if (source.ends_with(".json") || fs::exists(source)) return load_scenario(source);
  return preset(source);
}

void apply_overrides(Scenario& sc, const RunArgs& a) {
  if (!a.engine.empty()) sc.engine = engine_from_string(a.engine);
  if (a.dx > 0.0) {
    sc.mb.dx = a.dx;
    sc.effective.dx_vacuum = a.dx;
  }
  if (a.dt > 0.0) {
    sc.mb.dt = a.dt;
    sc.effective.dt = a.dt;
  }
  if (a.smoothing >= 0.0) sc.medium.interface_smoothing = a.smoothing;
  if (!a.limiter.empty()) sc.effective.limiter = limiter_from_string(a.limiter);
  if (a.no_diffusion) sc.effective.diffusion = false;
  if (a.first_order) sc.effective.muscl = false;
  if (a.snapshots > 0) {
    sc.snapshot_times.clear();
    for (int k = 0; k < a.snapshots; ++k)
      sc.snapshot_times.push_back(a.snapshots == 1 ? sc.t_end : sc.t_end * k / (a.snapshots - 1));
  }
}

// Overrides are checked before any time step is taken.
void check_numerics(const Scenario& sc) {
  if (sc.engine != Engine::Effective) {
    const Grid g = sc.mb_grid();
    g.validate();
    MbSolver probe(g, sc.medium);
    probe.check_stability(g.dt);
  }
  if (sc.engine != Engine::MB) EffectiveSolver probe(sc.medium, sc.effective_options());
}

json header_for(const Scenario& sc, const ScenarioRun& r, const std::string& engine) {
  json h;
  h["units"] = sc.units.enabled() ? "normalized (omega_p = k_p = c = 1); x_um/t_us columns in SI"
                                  : "normalized (omega_p = k_p = c = 1)";
  h["engine"] = engine;
  h["config"] = to_json(sc);
  if (engine == "mb" && r.grid) h["grid"] = to_json(*r.grid);
  if (engine == "effective") {
    h["scheme"] = to_json(sc.effective_options());
    h["cells"] = r.mesh ? r.mesh->size() : 0;
  }
  return h;
}

Table with_si(Table t, const PhysicalUnits& u, const std::string& col, bool is_time) {
  if (!u.enabled()) return t;
  const auto it = std::find(t.columns.begin(), t.columns.end(), col);
  if (it == t.columns.end()) return t;
  const std::size_t c = static_cast<std::size_t>(it - t.columns.begin()), nc = t.columns.size();
  Table o;
  o.columns = t.columns;
  o.columns.push_back(is_time ? "t_us" : "x_um");
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t k = 0; k < nc; ++k) o.data.push_back(t.data[r * nc + k]);
    const double v = t.data[r * nc + c];
    o.data.push_back(is_time ? u.to_us(v) : u.to_um(v));
  }
  return o;
}

json diagnostics_json(const Diagnostics& d) {
  json j;
  auto put = [&](const char* k, const std::optional<double>& v) {
    if (v) j[k] = *v;
  };
  put("delay", d.delay);
  put("compression", d.compression);
  put("peak_ratio", d.peak_ratio);
  put("retrieval_efficiency", d.retrieval_efficiency);
  put("hole_width", d.hole_width);
  put("peak_width", d.peak_width);
  if (!d.notes.empty()) j["notes"] = d.notes;
  return j;
}

// |E|^2 of the MB run against the effective intensity interpolated onto the
// MB grid, at the final time.
int cmd_run(const RunArgs& a) {
  Scenario sc = resolve(a.source);
  apply_overrides(sc, a);
  for (const auto& w : sc.validate()) std::cerr << "warning: " << w << "\n";
  check_numerics(sc);
  const OutputFormat fmt = format_from_string(a.format);
  const std::string ext = fmt == OutputFormat::Text ? ".txt" : ".bin";
  fs::create_directories(a.out);
  {
    std::ofstream cfg(fs::path(a.out) / "config.json");
    cfg << to_json(sc).dump(2) << "\n";
  }
  const ScenarioRun r = run_scenario(sc, sc.engine, a.out);

  json summary;
  summary["scenario"] = sc.name;
  summary["engine"] = to_string(sc.engine);
  std::optional<ScenarioRun> vac;
  if (std::find(sc.diagnostics.begin(), sc.diagnostics.end(), "delay") != sc.diagnostics.end()) {
    Scenario v = vacuum_control(sc);
    v.engine = sc.engine;
    vac = run_scenario(v, v.engine);
  }
  if (r.mb) {
    const json h = header_for(sc, r, "mb");
    for (std::size_t k = 0; k < r.mb->snapshots.size(); ++k) {
      json hk = h;
      hk["t"] = r.mb->snapshots[k].t;
      write_table(fs::path(a.out) / ("mb_snapshot_" + std::to_string(k) + ext), hk,
                  with_si(snapshot_table(r.mb->snapshots[k], *r.grid), sc.units, "x", false), fmt);
    }
    write_table(fs::path(a.out) / "mb_diagnostics.txt", h,
                with_si(diagnostics_table(r.mb->diagnostics), sc.units, "t", true), OutputFormat::Text);
    ScenarioRun only;
    only.grid = r.grid;
    only.mb = r.mb;
    ScenarioRun vonly;
    if (vac) {
      vonly.grid = vac->grid;
      vonly.mb = vac->mb;
    }
    summary["mb"] = diagnostics_json(measure(sc, only, vac ? &vonly : nullptr));
  }
  if (r.effective) {
    const json h = header_for(sc, r, "effective");
    for (std::size_t k = 0; k < r.effective->snapshots.size(); ++k) {
      json hk = h;
      hk["t"] = r.effective->snapshots[k].t;
      write_table(fs::path(a.out) / ("effective_snapshot_" + std::to_string(k) + ext), hk,
                  with_si(snapshot_table(r.effective->snapshots[k], *r.mesh, sc.medium), sc.units, "x", false), fmt);
    }
    write_table(fs::path(a.out) / "effective_diagnostics.txt", h,
                with_si(diagnostics_table(r.effective->diagnostics), sc.units, "t", true), OutputFormat::Text);
    if (!r.effective->probe_t.empty()) {
      Table t;
      t.columns = {"t"};
      for (double x : sc.effective.probes) t.columns.push_back("I_at_" + std::to_string(x));
      for (std::size_t k = 0; k < r.effective->probe_t.size(); ++k) {
        t.data.push_back(r.effective->probe_t[k]);
        for (const auto& p : r.effective->probe_I) t.data.push_back(p[k]);
      }
      write_table(fs::path(a.out) / "effective_probes.txt", h, with_si(t, sc.units, "t", true), OutputFormat::Text);
    }
    ScenarioRun only;
    only.mesh = r.mesh;
    only.effective = r.effective;
    ScenarioRun vonly;
    if (vac) {
      vonly.mesh = vac->mesh;
      vonly.effective = vac->effective;
    }
    summary["effective"] = diagnostics_json(measure(sc, only, vac ? &vonly : nullptr));
  }
  if (r.mb && r.effective) {
    summary["mb_vs_effective_l2"] = engine_l2(r);
    std::cout << "MB vs effective relative L2 at t = " << sc.t_end << ": " << summary["mb_vs_effective_l2"] << "\n";
  }
  std::ofstream(fs::path(a.out) / "summary.json") << summary.dump(2) << "\n";
  std::cout << summary.dump(2) << "\n";
  return 0;
}

struct MaterialArgs {
  double D = 0.01;
  double omega_c = 0.04;
  double v = 0.0;
  double gamma_e = 0.01;
  double gamma_m = 0.0;
  double delta_e = 0.0;
  double delta_R = 0.0;
  double half_bandwidth = 0.5;
};

EitParams params_of(const MaterialArgs& m) {
  EitParams p;
  p.coupling_D = m.D;
  p.gamma_e = m.gamma_e;
  p.gamma_m = m.gamma_m;
  p.delta_e = m.delta_e;
  p.delta_R = m.delta_R;
  p.omega_c_rabi = m.v > 0.0 ? control_for_group_velocity(m.v, m.D) : m.omega_c;
  p.validate();
  return p;
}

void add_material(CLI::App* app, MaterialArgs& m) {
  app->add_option("--D", m.D, "coupling constant D");
  auto* om = app->add_option("--omega-c", m.omega_c, "control Rabi frequency (units of omega_p)")
                 ->each([&m](const std::string&) { m.v = 0.0; });
  app->add_option("--v", m.v, "resonant group velocity (default for scan: 0.11)")->excludes(om);
  app->add_option("--gamma-e", m.gamma_e, "excited-state decay rate");
  app->add_option("--gamma-m", m.gamma_m, "metastable decoherence rate");
  app->add_option("--delta-e", m.delta_e, "one-photon detuning");
  app->add_option("--delta-R", m.delta_R, "two-photon detuning");
  app->add_option("--half-bandwidth", m.half_bandwidth, "Erf dispersion half-bandwidth");
}

std::ostream* open_out(const std::string& path, std::ofstream& f) {
  if (path.empty() || path == "-") return &std::cout;
  f.open(path);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  return &f;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"EIT-chain pulse propagation: Maxwell-Bloch and effective polariton-flow engines"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "run a preset or a JSON scenario");
  run->add_option("scenario", ra.source, "preset name or config file")->required();
  run->add_option("--engine", ra.engine, "mb, effective or both")->check(CLI::IsMember({"mb", "effective", "both"}));
  run->add_option("--out", ra.out, "output directory");
  run->add_option("--dx", ra.dx, "MB grid spacing and effective vacuum cell width");
  run->add_option("--dt", ra.dt, "time step for both engines");
  run->add_option("--snapshots", ra.snapshots, "number of evenly spaced snapshots including t = 0 and t_end");
  run->add_option("--format", ra.format, "text or binary")->check(CLI::IsMember({"text", "binary"}));
  run->add_option("--limiter", ra.limiter, "minmod, mc or superbee")->check(CLI::IsMember({"minmod", "mc", "superbee"}));
  run->add_option("--smoothing", ra.smoothing, "interface smoothing width");
  run->add_flag("--no-diffusion", ra.no_diffusion, "drop the loss diffusion term of the effective engine");
  run->add_flag("--first-order", ra.first_order, "plain upwind instead of MUSCL");

  MaterialArgs bm;
  double k_min = 0.0, k_max = 2.0;
  int nk = 401;
  std::string bands_out;
  auto* bands = app.add_subcommand("bands", "polariton band table (k, Re w x3, Im w x3, weights x9)");
  add_material(bands, bm);
  bands->add_option("--k-min", k_min);
  bands->add_option("--k-max", k_max);
  bands->add_option("--n", nk)->check(CLI::PositiveNumber);
  bands->add_option("--out", bands_out, "output file (default stdout)");

  MaterialArgs sm;
  sm.D = 0.01;
  sm.v = 0.11;
  sm.gamma_e = 1e-3;
  double length = 100.0, d_span = 0.0, s_dx = 1.0, s_dt = 0.0, s_sponge = 200.0;
  TransmissionOptions s_opt;
  int nd = 41;
  std::string scan_out;
  auto* scan = app.add_subcommand("scan", "transmission/reflection scan of a static layer");
  add_material(scan, sm);
  scan->add_option("--length", length, "layer thickness");
  scan->add_option("--span", d_span, "scan detunings in [-span, span]; default 3x the closed-form window");
  scan->add_option("--n", nd)->check(CLI::PositiveNumber);
  scan->add_option("--dx", s_dx);
  scan->add_option("--dt", s_dt);
  scan->add_option("--pulse-sigma", s_opt.pulse_sigma,
                   "probe pulse length; long pulses give cleaner spectra near resonance")
      ->check(CLI::PositiveNumber);
  scan->add_option("--sponge", s_sponge, "absorbing layer width at each end")->check(CLI::NonNegativeNumber);
  scan->add_option("--out", scan_out, "output file (default stdout)");

  bool as_json = false;
  auto* presets = app.add_subcommand("presets", "list presets and their parameters");
  presets->add_flag("--json", as_json, "full resolved configurations");

  std::string vsource;
  auto* validate = app.add_subcommand("validate", "check a preset or config without running it");
  validate->add_option("scenario", vsource)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(ra);
    if (*bands) {
      const EitParams p = params_of(bm);
      std::vector<double> ks(nk);
      for (int i = 0; i < nk; ++i) ks[i] = nk == 1 ? k_min : k_min + (k_max - k_min) * i / (nk - 1);
      const auto pts = band_scan(p, DispersionSubstitute::erf(bm.half_bandwidth), ks);
      std::ofstream f;
      std::ostream* os = open_out(bands_out, f);
      *os << "# D=" << p.coupling_D << " omega_c=" << p.omega_c_rabi << " gamma_e=" << p.gamma_e
          << " gamma_m=" << p.gamma_m << " delta_e=" << p.delta_e << " delta_R=" << p.delta_R
          << " erf_half_bandwidth=" << bm.half_bandwidth << " units=normalized\n";
      write_band_table(*os, pts);
      return 0;
    }
    if (*scan) {
      const EitParams p = params_of(sm);
      MediumProfile m;
      m.protocols = {ModulationProtocol::constant(ProtocolQuantity::ControlRabi, p.omega_c_rabi)};
      Layer L;
      L.x_start = 0.0;
      L.x_end = length;
      L.coupling_D = p.coupling_D;
      L.gamma_e = p.gamma_e;
      L.gamma_m = p.gamma_m;
      L.delta_e = p.delta_e;
      L.delta_R = p.delta_R;
      L.name = "layer";
      m.layers = {L};
      const double window = transmission_window(p, length);
      if (d_span <= 0.0) d_span = 3.0 * window;
      std::vector<double> ds(nd);
      for (int i = 0; i < nd; ++i) ds[i] = nd == 1 ? 0.0 : -d_span + 2.0 * d_span * i / (nd - 1);
      const TransmissionOptions& opt = s_opt;
      const Grid g = scan_grid(m, opt, s_dx, s_dt, s_sponge);
      const auto pts = transmission_scan(g, m, ds, DispersionSubstitute::erf(sm.half_bandwidth), opt);
      std::ofstream f;
      std::ostream* os = open_out(scan_out, f);
      *os << "# length=" << length << " D=" << p.coupling_D << " omega_c=" << p.omega_c_rabi
          << " gamma_e=" << p.gamma_e << " closed_form_window=" << window << " grid_dx=" << g.dx
          << " grid_dt=" << g.dt << "\n";
      try {
        const auto fit = fit_transmission_window(pts);
        *os << "# fitted_window=" << fit.width << " T0=" << fit.peak << " core_points=" << fit.points << "\n";
      } catch (const NonConverged& e) {
        *os << "# window fit failed: " << e.what() << "\n";
      }
      *os << "# detuning T R\n";
      os->precision(12);
      for (const auto& q : pts) *os << q.detuning << ' ' << q.transmittance << ' ' << q.reflectance << '\n';
      return 0;
    }
    if (*presets) {
      for (const auto& n : preset_names()) {
        const Scenario sc = preset(n);
        if (as_json) {
          std::cout << to_json(sc).dump(2) << "\n";
          continue;
        }
        std::cout << n << ": " << sc.description << "\n";
        std::cout << "  engine=" << to_string(sc.engine) << " launch=" << to_string(sc.launch)
                  << " t_end=" << sc.t_end << " pulse_sigma=" << sc.pulse.sigma << "\n";
        for (std::size_t l = 0; l < sc.medium.layers.size(); ++l) {
          const Layer& L = sc.medium.layers[l];
          std::cout << "  " << sc.medium.layer_label(static_cast<int>(l)) << ": [" << L.x_start << ", " << L.x_end
                    << "] D=" << L.coupling_D << " gamma_e=" << L.gamma_e
                    << " v0=" << sc.medium.velocity(static_cast<int>(l), 0.0) << "\n";
        }
        for (const auto& [k, v] : sc.assumptions) std::cout << "  assumed " << k << ": " << v << "\n";
      }
      return 0;
    }
    if (*validate) {
      const Scenario sc = resolve(vsource);
      for (const auto& w : sc.validate()) std::cerr << "warning: " << w << "\n";
      check_numerics(sc);
      std::cout << sc.name << ": ok\n";
      return 0;
    }
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure at t = " << e.time << ": " << e.what() << "\n";
    if (!e.snapshot_path.empty()) std::cerr << "diagnostic snapshot: " << e.snapshot_path << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const CflViolation& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const PulseOverlapsMedium& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace eit
