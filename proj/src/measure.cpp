#include "eitchain/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eit {

namespace {

void check_sizes(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw ConfigError("measure: x and y must be non-empty and of equal size");
}

double crossing(double x0, double y0, double x1, double y1, double level) {
  if (y1 == y0) return 0.5 * (x0 + x1);
  return x0 + (level - y0) * (x1 - x0) / (y1 - y0);
}

PeakInfo refine(std::span<const double> x, std::span<const double> y, std::size_t i) {
  PeakInfo p{x[i], y[i]};
  if (i == 0 || i + 1 >= x.size()) return p;
  const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
  const double d1 = (y[i] - y[i - 1]) / (x1 - x0), d2 = (y[i + 1] - y[i]) / (x2 - x1);
  const double a = (d2 - d1) / (x2 - x0);
  if (a >= 0.0) return p;
  const double b = d1 - a * (x0 + x1);
  const double xv = std::clamp(-b / (2.0 * a), x0, x2);
  p.x = xv;
  p.value = y[i] + (xv - x1) * (d1 + a * (xv - x0));
  return p;
}

// Extrema whose prominence (drop to the lower of the two neighbouring
// opposite extrema) exceeds min_prominence.
std::vector<PeakInfo> extrema(std::span<const double> x, std::span<const double> y, double min_prom, bool maxima) {
  std::vector<double> s(y.begin(), y.end());
  if (!maxima)
    for (double& v : s) v = -v;
  const std::size_t n = s.size();
  std::vector<PeakInfo> out;
  std::size_t i = 0;
  while (i < n) {
    // Plateaus count once, at their middle.
    std::size_t j = i;
    while (j + 1 < n && s[j + 1] == s[i]) ++j;
    const bool left_lower = i == 0 || s[i - 1] < s[i];
    const bool right_lower = j + 1 == n || s[j + 1] < s[i];
    if (left_lower && right_lower && i > 0 && j + 1 < n) {
      const std::size_t c = (i + j) / 2;
      double lmin = s[i], rmin = s[i];
      for (std::size_t k = i; k-- > 0;) {
        if (s[k] > s[i]) break;
        lmin = std::min(lmin, s[k]);
      }
      for (std::size_t k = j + 1; k < n; ++k) {
        if (s[k] > s[i]) break;
        rmin = std::min(rmin, s[k]);
      }
      const double prom = s[i] - std::max(lmin, rmin);
      if (prom >= min_prom) {
        PeakInfo p = maxima ? refine(x, y, c) : PeakInfo{x[c], y[c]};
        out.push_back(p);
      }
    }
    i = j + 1;
  }
  return out;
}

}  // namespace

std::vector<PeakInfo> local_maxima(std::span<const double> x, std::span<const double> y, double min_prominence) {
  check_sizes(x, y);
  return extrema(x, y, min_prominence, true);
}

std::vector<PeakInfo> local_minima(std::span<const double> x, std::span<const double> y, double min_prominence) {
  check_sizes(x, y);
  return extrema(x, y, min_prominence, false);
}

PeakInfo track_peak(std::span<const double> x, std::span<const double> y, bool strict) {
  check_sizes(x, y);
  const auto im = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const PeakInfo best = refine(x, y, im);
  if (strict) {
    auto cands = extrema(x, y, 0.05 * best.value, true);
    std::erase_if(cands, [&](const PeakInfo& p) { return p.value < 0.9 * best.value; });
    if (cands.size() > 1) throw PeakAmbiguous("track_peak: " + std::to_string(cands.size()) + " comparable maxima", cands);
  }
  return best;
}

double integrate(std::span<const double> x, std::span<const double> y) {
  check_sizes(x, y);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) acc += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
  return acc;
}

double integrate(std::span<const double> x, std::span<const double> y, double a, double b) {
  check_sizes(x, y);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double lo = std::max(a, x[i]), hi = std::min(b, x[i + 1]);
    if (hi <= lo) continue;
    const double h = x[i + 1] - x[i];
    auto at = [&](double z) { return y[i] + (y[i + 1] - y[i]) * (z - x[i]) / h; };
    acc += 0.5 * (at(lo) + at(hi)) * (hi - lo);
  }
  return acc;
}

double second_moment_width(std::span<const double> x, std::span<const double> y) {
  check_sizes(x, y);
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    m0 += y[i];
    m1 += y[i] * x[i];
  }
  if (!(m0 > 0.0)) return 0.0;
  const double c = m1 / m0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m2 += y[i] * (x[i] - c) * (x[i] - c);
  return std::sqrt(m2 / m0);
}

double fwhm(std::span<const double> x, std::span<const double> y) {
  check_sizes(x, y);
  const auto im = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const double half = 0.5 * y[im];
  std::size_t l = im, r = im;
  while (l > 0 && y[l - 1] >= half) --l;
  while (r + 1 < y.size() && y[r + 1] >= half) ++r;
  const double xl = l > 0 ? crossing(x[l - 1], y[l - 1], x[l], y[l], half) : x[0];
  const double xr = r + 1 < y.size() ? crossing(x[r], y[r], x[r + 1], y[r + 1], half) : x.back();
  return xr - xl;
}

std::vector<double> grid_positions(const Grid& g) {
  std::vector<double> x(g.n_points);
  for (std::size_t i = 0; i < g.n_points; ++i) x[i] = g.x(i);
  return x;
}

std::vector<double> intensity(const FieldState& s) {
  std::vector<double> I(s.E.size());
  for (std::size_t i = 0; i < I.size(); ++i) I[i] = std::norm(s.E[i]);
  return I;
}

double relative_l2(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("relative_l2: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double relative_linf(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("relative_linf: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den > 0.0 ? num / den : num;
}

DefectFeatures defect_features(std::span<const double> x, std::span<const double> I, double L_d) {
  check_sizes(x, I);
  const std::size_t n = x.size();
  const auto first = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), L_d) - x.begin());
  if (first + 3 >= n) throw ConfigError("defect_features: profile does not extend past the defect");
  DefectFeatures f;

  std::size_t im = first;
  for (std::size_t i = first; i < n; ++i)
    if (I[i] > I[im]) im = i;
  const double half = 0.5 * I[im];
  std::size_t l = im, r = im;
  while (l > first && I[l - 1] >= half) --l;
  while (r + 1 < n && I[r + 1] >= half) ++r;
  const double pl = l > first ? crossing(x[l - 1], I[l - 1], x[l], I[l], half) : x[l];
  const double pr = r + 1 < n ? crossing(x[r], I[r], x[r + 1], I[r + 1], half) : x[r];
  f.peak_start = pl;
  f.peak_width = pr - pl;

  // Hole: lowest point between the defect exit face and the peak, bounded by
  // half-depth crossings relative to the light that left the defect.
  const double reach = 0.05 * L_d;
  const auto lo = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), L_d - reach) - x.begin());
  std::size_t ih = first;
  for (std::size_t i = first; i < l; ++i)
    if (I[i] < I[ih]) ih = i;
  double level = 0.0;
  for (std::size_t i = lo; i <= ih; ++i) level = std::max(level, I[i]);
  const double thr = I[ih] + 0.5 * (level - I[ih]);
  std::size_t a = ih, b = ih;
  while (a > lo && I[a - 1] < thr) --a;
  while (b + 1 < l && I[b + 1] < thr) ++b;
  const double hl = a > lo ? crossing(x[a - 1], I[a - 1], x[a], I[a], thr) : x[a];
  const double hr = b + 1 < n ? crossing(x[b], I[b], x[b + 1], I[b + 1], thr) : x[b];
  f.hole_start = hl;
  f.hole_width = hr - hl;
  return f;
}

StorageBalance storage_balance(std::span<const double> x, std::span<const double> I, double incident,
                               double layer_end, double t_retrieve, double t_end, double margin) {
  check_sizes(x, I);
  if (!(incident > 0.0)) throw ConfigError("storage_balance: incident intensity must be > 0");
  const double hi = layer_end + (t_end - t_retrieve) + margin;
  const double inf = std::numeric_limits<double>::infinity();
  StorageBalance b;
  b.incident = incident;
  b.reflected = integrate(x, I, -inf, 0.0);
  b.retrieved = integrate(x, I, layer_end, hi);
  b.front = integrate(x, I, hi, inf);
  b.efficiency = b.retrieved / incident;
  return b;
}

Scenario vacuum_control(const Scenario& sc) {
  Scenario v = sc;
  v.name = sc.name + "_vacuum";
  for (auto& L : v.medium.layers) {
    L.coupling_D = 0.0;
    L.gamma_e = 0.0;
  }
  if (v.launch == Launch::DarkPolariton) v.launch = Launch::Vacuum;
  v.claims_lossless = false;
  return v;
}

namespace {

// Time at which the tracked peak first passes x_probe.
std::optional<double> passage_time(const std::vector<DiagnosticSample>& d, double x_probe) {
  for (std::size_t k = 1; k < d.size(); ++k)
    if (d[k - 1].x_peak < x_probe && d[k].x_peak >= x_probe)
      return crossing(d[k - 1].t, d[k - 1].x_peak, d[k].t, d[k].x_peak, x_probe);
  return std::nullopt;
}

std::optional<double> trace_peak_time(const EffectiveRun& r) {
  if (r.probe_I.empty() || r.probe_t.size() < 3) return std::nullopt;
  return track_peak(r.probe_t, r.probe_I.back()).x;
}

double fraction_outside_layers(const MediumProfile& m, std::span<const double> x, std::span<const double> I) {
  double in = 0.0, all = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    all += I[i];
    if (m.layer_at(x[i]) >= 0) in += I[i];
  }
  return all > 0.0 ? 1.0 - in / all : 1.0;
}

}  // namespace

Diagnostics measure(const Scenario& sc, const ScenarioRun& run, const ScenarioRun* vac) {
  Diagnostics d;
  auto wants = [&](const char* k) { return std::find(sc.diagnostics.begin(), sc.diagnostics.end(), k) != sc.diagnostics.end(); };

  // Profiles (x, I) per snapshot for the engine that ran; MB wins when both did.
  std::vector<double> xs;
  std::vector<std::vector<double>> prof;
  std::vector<double> times;
  if (run.mb) {
    xs = grid_positions(*run.grid);
    for (const auto& s : run.mb->snapshots) {
      prof.push_back(intensity(s));
      times.push_back(s.t);
    }
  } else if (run.effective) {
    xs = run.mesh->centers;
    for (const auto& s : run.effective->snapshots) {
      prof.push_back(s.I);
      times.push_back(s.t);
    }
  } else {
    throw ConfigError("measure: run holds no engine output");
  }
  if (prof.size() < 2) throw ConfigError("measure: need at least the initial and final snapshots");

  if (wants("peak_ratio")) {
    const double p0 = track_peak(xs, prof.front()).value, p1 = track_peak(xs, prof.back()).value;
    d.peak_ratio = p0 > 0.0 ? p1 / p0 : 0.0;
  }
  if (wants("compression")) {
    std::size_t best = 0;
    double frac = 2.0;
    for (std::size_t k = 0; k < prof.size(); ++k) {
      const double f = fraction_outside_layers(sc.medium, xs, prof[k]);
      if (f < frac) {
        frac = f;
        best = k;
      }
    }
    if (frac < 1e-3 && sc.launch == Launch::Vacuum) {
      // Moments over the host layer only: far tails at the 1e-8 level would
      // otherwise dominate through the x^2 weight.
      const int li = sc.medium.layer_at(track_peak(xs, prof[best]).x);
      const Layer& L = sc.medium.layers.at(static_cast<std::size_t>(std::max(li, 0)));
      const auto a = std::lower_bound(xs.begin(), xs.end(), L.x_start) - xs.begin();
      const auto b = std::upper_bound(xs.begin(), xs.end(), L.x_end) - xs.begin();
      const std::span<const double> xin(xs.data() + a, static_cast<std::size_t>(b - a));
      const std::span<const double> iin(prof[best].data() + a, static_cast<std::size_t>(b - a));
      d.compression = second_moment_width(xin, iin) / second_moment_width(xs, prof.front());
    } else {
      d.notes.push_back("compression: no snapshot with the pulse fully inside a layer");
    }
  }
  if (wants("delay")) {
    if (!vac) {
      d.notes.push_back("delay: needs the vacuum control run");
    } else if (run.effective && vac->effective && !run.mb) {
      const auto a = trace_peak_time(*run.effective), b = trace_peak_time(*vac->effective);
      if (a && b) d.delay = *a - *b;
    } else if (run.mb && vac->mb) {
      const double xp = sc.medium.layers.back().x_end + 100.0;
      const auto a = passage_time(run.mb->diagnostics, xp), b = passage_time(vac->mb->diagnostics, xp);
      if (a && b)
        d.delay = *a - *b;
      else
        d.notes.push_back("delay: the peak did not pass the probe");
    }
  }
  if (wants("retrieval_efficiency")) {
    const auto bp = sc.medium.protocols.at(sc.medium.layers.front().protocol).breakpoints();
    const double t_ret = bp.size() >= 2 ? bp[bp.size() - 2] : sc.t_end;
    const double inc = integrate(xs, prof.front());
    d.retrieval_efficiency =
        storage_balance(xs, prof.back(), inc, sc.medium.layers.front().x_end, t_ret, times.back()).efficiency;
  }
  if (wants("hole_width") || wants("peak_width")) {
    if (sc.medium.layers.size() < 2) throw ConfigError("measure: defect widths need two bulks");
    const double x0 = sc.medium.layers[0].x_end, Ld = sc.medium.layers[1].x_start - x0;
    std::vector<double> xr(xs);
    for (double& v : xr) v -= x0;
    const DefectFeatures f = defect_features(xr, prof.back(), Ld);
    d.hole_width = f.hole_width;
    d.peak_width = f.peak_width;
  }
  return d;
}

double engine_l2(const ScenarioRun& r) {
  if (!r.mb || !r.effective) throw ConfigError("engine_l2: needs both engines");
  const auto& mesh = *r.mesh;
  const auto& Ie = r.effective->snapshots.back().I;
  const auto Im = intensity(r.mb->snapshots.back());
  std::vector<double> a, b;
  for (std::size_t i = 0; i < r.grid->n_points; ++i) {
    const double x = r.grid->x(i);
    if (x < mesh.centers.front() || x > mesh.centers.back()) continue;
    const auto k = static_cast<std::size_t>(std::upper_bound(mesh.centers.begin(), mesh.centers.end(), x) -
                                            mesh.centers.begin());
    const std::size_t j = std::min(k, mesh.size() - 1), h = j == 0 ? 0 : j - 1;
    const double w = j == h ? 0.0 : (x - mesh.centers[h]) / (mesh.centers[j] - mesh.centers[h]);
    a.push_back((1.0 - w) * Ie[h] + w * Ie[j]);
    b.push_back(Im[i]);
  }
  return relative_l2(a, b);
}

}  // namespace eit
