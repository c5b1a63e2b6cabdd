#include "eitchain/effective_flow.hpp"

#include <algorithm>
#include <cmath>

#include "eitchain/error.hpp"

namespace eit {

std::size_t EffectiveMesh::index_of(double x) const {
  auto it = std::upper_bound(edges.begin(), edges.end(), x);
  if (it == edges.begin()) return 0;
  const auto i = static_cast<std::size_t>(it - edges.begin()) - 1;
  return std::min(i, centers.size() - 1);
}

namespace {

EffectiveMesh build_mesh(const MediumProfile& m, const EffectiveOptions& o) {
  struct Region {
    double a, b;
    int layer;
  };
  std::vector<Region> regions;
  double cursor = o.x_min;
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const double a = std::max(m.layers[l].x_start, o.x_min);
    const double b = std::min(m.layers[l].x_end, o.x_max);
    // Layers without atoms are vacuum and join the surrounding gap.
    if (b <= a || m.layers[l].coupling_D == 0.0) continue;
    if (a > cursor) regions.push_back({cursor, a, -1});
    regions.push_back({a, b, static_cast<int>(l)});
    cursor = b;
  }
  if (o.x_max > cursor) regions.push_back({cursor, o.x_max, -1});

  EffectiveMesh mesh;
  mesh.edges.push_back(o.x_min);
  for (const Region& r : regions) {
    const double vmax = r.layer < 0 || m.layers[r.layer].coupling_D == 0.0 ? 1.0 : m.max_velocity(r.layer);
    if (!(vmax > 0.0)) throw ConfigError("effective engine: " + m.layer_label(r.layer) + " never transmits light");
    const double target = o.dx_vacuum * vmax;
    // Round the count down so that no cell is narrower than v_max dt.
    const auto n = std::max<long>(1, static_cast<long>(std::floor((r.b - r.a) / target + 1e-9)));
    for (long k = 1; k <= n; ++k) {
      const double x = k == n ? r.b : r.a + (r.b - r.a) * static_cast<double>(k) / static_cast<double>(n);
      mesh.edges.push_back(x);
      mesh.layer.push_back(r.layer);
    }
  }
  const std::size_t n = mesh.edges.size() - 1;
  mesh.centers.resize(n);
  mesh.widths.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    mesh.centers[i] = 0.5 * (mesh.edges[i] + mesh.edges[i + 1]);
    mesh.widths[i] = mesh.edges[i + 1] - mesh.edges[i];
  }
  return mesh;
}

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return a > 0.0 ? std::min(a, b) : std::max(a, b);
}

double limited_slope(SlopeLimiter lim, double a, double b) {
  if (a * b <= 0.0) return 0.0;
  switch (lim) {
    case SlopeLimiter::Minmod:
      return minmod(a, b);
    case SlopeLimiter::MonotonizedCentral:
      return minmod(0.5 * (a + b), 2.0 * minmod(a, b));
    case SlopeLimiter::Superbee: {
      const double s1 = minmod(b, 2.0 * a), s2 = minmod(2.0 * b, a);
      return std::abs(s1) > std::abs(s2) ? s1 : s2;
    }
  }
  return 0.0;
}

}  // namespace

EffectiveSolver::EffectiveSolver(MediumProfile medium, EffectiveOptions opt)
    : medium_(std::move(medium)), opt_(opt) {
  medium_.validate();
  if (!(opt_.x_max > opt_.x_min)) throw ConfigError("effective engine: empty domain");
  if (!(opt_.dx_vacuum > 0.0)) throw ConfigError("effective engine: dx_vacuum must be > 0");
  mesh_ = build_mesh(medium_, opt_);
  dt_ = opt_.dt > 0.0 ? opt_.dt : opt_.dx_vacuum;
  flux_.resize(mesh_.size());
  work_.resize(mesh_.size());
}

double EffectiveSolver::velocity(std::size_t cell, double t) const {
  const int l = mesh_.layer[cell];
  if (l < 0) return 1.0;
  return medium_.velocity(l, t);
}

double EffectiveSolver::diffusivity(std::size_t cell, double t) const {
  const int l = mesh_.layer[cell];
  if (l < 0) return 0.0;
  const Layer& L = medium_.layers[l];
  if (L.coupling_D == 0.0 || L.gamma_e == 0.0) return 0.0;
  return medium_.velocity(l, t) * L.gamma_e / L.coupling_D;
}

IntensityState EffectiveSolver::init(const std::function<double(double)>& I0, double t0) const {
  static const double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  IntensityState s;
  s.t = t0;
  s.I.resize(mesh_.size());
  for (std::size_t i = 0; i < mesh_.size(); ++i) {
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) acc += gw[k] * I0(mesh_.centers[i] + 0.5 * mesh_.widths[i] * gx[k]);
    s.I[i] = 0.5 * acc;
  }
  return s;
}

IntensityState EffectiveSolver::init_gaussian(double x0, double sigma, double amplitude, double t0) const {
  return init([=](double x) {
    const double u = (x - x0) / sigma;
    return amplitude * amplitude * std::exp(-u * u);
  }, t0);
}

void EffectiveSolver::advect(IntensityState& s, double t_mid, double dt) {
  const std::size_t n = mesh_.size();
  auto& I = s.I;
  std::vector<double> vl(medium_.layers.size());
  for (std::size_t l = 0; l < vl.size(); ++l) vl[l] = medium_.velocity(static_cast<int>(l), t_mid);
  for (std::size_t i = 0; i < n; ++i) {
    const int l = mesh_.layer[i];
    work_[i] = (l < 0 ? 1.0 : vl[l]) * dt / mesh_.widths[i];
    if (work_[i] > 1.0 + 1e-12)
      throw CflViolation("effective engine: Courant number " + std::to_string(work_[i]) + " in cell " +
                         std::to_string(i));
  }
  for (std::size_t i = 0; i < n; ++i) {
    double f = I[i];
    if (opt_.muscl && i > 0 && i + 1 < n) f += 0.5 * (1.0 - work_[i]) * limited_slope(opt_.limiter, I[i] - I[i - 1], I[i + 1] - I[i]);
    flux_[i] = f;
  }
  double upstream = inflow ? inflow(t_mid - 0.5 * dt + 0.5 * mesh_.widths[0]) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double fi = flux_[i];
    I[i] -= work_[i] * (fi - upstream);
    upstream = fi;
  }
}

void EffectiveSolver::diffuse(IntensityState& s, double t, double dt) {
  const std::size_t n = mesh_.size();
  if (n < 2) return;
  std::vector<double> dl(medium_.layers.size(), 0.0);
  bool any = false;
  for (std::size_t l = 0; l < dl.size(); ++l) {
    const Layer& L = medium_.layers[l];
    if (L.coupling_D > 0.0 && L.gamma_e > 0.0) dl[l] = medium_.velocity(static_cast<int>(l), t) * L.gamma_e / L.coupling_D;
    any = any || dl[l] > 0.0;
  }
  if (!any) return;
  std::vector<double> face(n - 1), dist(n - 1);
  double rate = 0.0;
  any = false;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = mesh_.layer[i] < 0 ? 0.0 : dl[mesh_.layer[i]];
    const double b = mesh_.layer[i + 1] < 0 ? 0.0 : dl[mesh_.layer[i + 1]];
    face[i] = (a > 0.0 && b > 0.0) ? 2.0 * a * b / (a + b) : 0.0;
    dist[i] = mesh_.centers[i + 1] - mesh_.centers[i];
    any = any || face[i] > 0.0;
  }
  if (!any) return;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += face[i - 1] / dist[i - 1];
    if (i + 1 < n) r += face[i] / dist[i];
    rate = std::max(rate, r / mesh_.widths[i]);
  }
  const int sub = std::max(1, static_cast<int>(std::ceil(dt * rate / 0.9)));
  const double h = dt / sub;
  auto& I = s.I;
  for (int k = 0; k < sub; ++k) {
    for (std::size_t i = 0; i + 1 < n; ++i) flux_[i] = face[i] * (I[i + 1] - I[i]) / dist[i];
    for (std::size_t i = 0; i < n; ++i) {
      double d = 0.0;
      if (i + 1 < n) d += flux_[i];
      if (i > 0) d -= flux_[i - 1];
      I[i] += h * d / mesh_.widths[i];
    }
  }
}

void EffectiveSolver::check_positive(IntensityState& s) const {
  double mx = 0.0;
  for (double v : s.I) mx = std::max(mx, v);
  const double floor = -1e-14 * mx;
  for (std::size_t i = 0; i < s.I.size(); ++i) {
    const double v = s.I[i];
    if (!std::isfinite(v)) throw NumericalFailure("effective engine: non-finite intensity", s.t);
    if (v < 0.0) {
      if (v < floor)
        throw NegativeIntensity("effective engine: intensity " + std::to_string(v) + " in cell " +
                                    std::to_string(i),
                                s.t);
      s.I[i] = 0.0;
    }
  }
}

void EffectiveSolver::step(IntensityState& s, double dt) {
  const double t0 = s.t, tm = t0 + 0.5 * dt, t1 = t0 + dt;
  const std::size_t n = mesh_.size();
  // The source term integrates exactly to a velocity ratio at fixed x.
  auto scale = [&](double ta, double tb) {
    std::vector<double> ratio(medium_.layers.size(), 1.0);
    bool any = false;
    for (std::size_t l = 0; l < ratio.size(); ++l) {
      const double va = medium_.velocity(static_cast<int>(l), ta), vb = medium_.velocity(static_cast<int>(l), tb);
      if (!(va > 0.0 && vb > 0.0))
        throw ConfigError("effective engine: group velocity vanished in " + medium_.layer_label(static_cast<int>(l)));
      if (va == vb) continue;
      ratio[l] = vb / va;
      any = true;
    }
    if (!any) return;
    for (std::size_t i = 0; i < n; ++i)
      if (mesh_.layer[i] >= 0) s.I[i] *= ratio[mesh_.layer[i]];
  };
  scale(t0, tm);
  advect(s, tm, dt);
  scale(tm, t1);
  if (opt_.diffusion) diffuse(s, tm, dt);
  s.t = t1;
  check_positive(s);
}

void evolve_intensity(EffectiveSolver& solver, IntensityState& s, double dt) { solver.step(s, dt); }

double EffectiveSolver::polariton_content(const IntensityState& s) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < mesh_.size(); ++i) acc += s.I[i] / velocity(i, s.t) * mesh_.widths[i];
  return acc;
}

IntensityDiagnostic EffectiveSolver::diagnose(const IntensityState& s) const {
  IntensityDiagnostic d;
  d.t = s.t;
  std::size_t imax = 0;
  for (std::size_t i = 0; i < mesh_.size(); ++i) {
    d.integral += s.I[i] * mesh_.widths[i];
    if (s.I[i] > s.I[imax]) imax = i;
  }
  d.content = polariton_content(s);
  d.peak = s.I.empty() ? 0.0 : s.I[imax];
  d.x_peak = s.I.empty() ? 0.0 : mesh_.centers[imax];
  if (imax > 0 && imax + 1 < mesh_.size()) {
    // Parabola through three possibly unequal spacings.
    const double x0 = mesh_.centers[imax - 1], x1 = mesh_.centers[imax], x2 = mesh_.centers[imax + 1];
    const double y0 = s.I[imax - 1], y1 = s.I[imax], y2 = s.I[imax + 1];
    const double d1 = (y1 - y0) / (x1 - x0), d2 = (y2 - y1) / (x2 - x1);
    const double a = (d2 - d1) / (x2 - x0);
    if (a < 0.0) {
      const double b = d1 - a * (x0 + x1);
      const double xv = std::clamp(-b / (2.0 * a), x0, x2);
      d.x_peak = xv;
      d.peak = y1 + (xv - x1) * (d1 + a * (xv - x0));
    }
  }
  return d;
}

EffectiveRun EffectiveSolver::run(IntensityState s, double t_max, std::span<const double> snapshot_times,
                                  int diag_every, std::span<const double> probes) {
  if (!(t_max > s.t)) throw ConfigError("run: t_max must exceed the initial time");
  std::vector<double> targets;
  for (double t : snapshot_times)
    if (t >= s.t && t <= t_max) targets.push_back(t);
  std::sort(targets.begin(), targets.end());
  std::vector<bool> is_snap(targets.size(), true);
  if (targets.empty() || targets.back() < t_max) {
    targets.push_back(t_max);
    is_snap.push_back(false);
  }
  std::vector<std::size_t> probe_cells;
  for (double x : probes) probe_cells.push_back(mesh_.index_of(x));

  EffectiveRun out;
  out.probe_I.resize(probe_cells.size());
  auto record_probes = [&] {
    if (probe_cells.empty()) return;
    out.probe_t.push_back(s.t);
    for (std::size_t k = 0; k < probe_cells.size(); ++k) out.probe_I[k].push_back(s.I[probe_cells[k]]);
  };
  out.diagnostics.push_back(diagnose(s));
  record_probes();
  if (observer) observer(s);
  const double eps = 1e-9 * dt_;
  long count = 0;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const double T = targets[k];
    while (T - s.t > eps) {
      step(s, std::min(dt_, T - s.t));
      ++count;
      record_probes();
      if (diag_every > 0 && count % diag_every == 0) {
        out.diagnostics.push_back(diagnose(s));
        if (observer) observer(s);
      }
    }
    s.t = T;
    if (is_snap[k]) out.snapshots.push_back(s);
  }
  if (out.diagnostics.back().t != s.t) out.diagnostics.push_back(diagnose(s));
  if (out.snapshots.empty() || out.snapshots.back().t != s.t) out.snapshots.push_back(s);
  return out;
}

double slice_modulation_estimate(double intensity_in, double v_in, double delta_v) {
  return intensity_in * (v_in + delta_v) / v_in;
}

double linear_ramp_slice_change(double delta_v, double v_in, double T, double tau) {
  return (delta_v / v_in) * (T / tau);
}

double absorption_length_ratio(const EitParams& p, double sigma_t) {
  const double v = group_velocity_resonance(p).v;
  return v * p.coupling_D * p.omega_p * p.omega_p / p.gamma_e * sigma_t;
}

double absorption_length(const EitParams& p, double sigma_t) {
  const double v = group_velocity_resonance(p).v;
  return absorption_length_ratio(p, sigma_t) * sigma_t * v;
}

}  // namespace eit
