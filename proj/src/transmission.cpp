#include "eitchain/transmission.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eitchain/error.hpp"
#include "eitchain/mb_solver.hpp"

namespace eit {

namespace {

struct ProbeRecord {
  std::vector<double> t;
  std::vector<cplx> left, right;
  double residual = 0.0;
};

ProbeRecord record_probes(const Grid& grid, const MediumProfile& medium, const DispersionSubstitute& sub,
                          const PulseSpec& pulse, std::size_t i_left, std::size_t i_right, double t_max) {
  MbSolver solver(grid, medium, sub);
  FieldState s = solver.init_state(pulse);
  const double n0 = s.n_pol0;
  ProbeRecord rec;
  const auto steps = static_cast<long>(std::ceil(t_max / grid.dt));
  rec.t.reserve(steps + 1);
  rec.left.reserve(steps + 1);
  rec.right.reserve(steps + 1);
  for (long k = 0; k <= steps; ++k) {
    rec.t.push_back(s.t);
    rec.left.push_back(s.E[i_left]);
    rec.right.push_back(s.E[i_right]);
    if (k < steps) solver.step(s);
  }
  double interior = 0.0;
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    const double x = grid.x(i);
    if (x < grid.x_min + grid.sponge_width || x >= grid.x_max() - grid.sponge_width) continue;
    interior += std::norm(s.E[i]) + std::norm(s.rho_eg[i]) + std::norm(s.rho_mg[i]);
  }
  rec.residual = interior * grid.dx / n0;
  return rec;
}

cplx spectrum(const std::vector<double>& t, const std::vector<cplx>& f, double delta) {
  // Trapezoid rule; the envelope component exp(-i delta t) is picked out.
  cplx acc = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double w = (k == 0 || k + 1 == t.size()) ? 0.5 : 1.0;
    acc += w * f[k] * std::polar(1.0, delta * t[k]);
  }
  return acc;
}

}  // namespace

std::vector<TransmissionPoint> transmission_scan(const Grid& grid, const MediumProfile& medium,
                                                 std::span<const double> detunings,
                                                 const DispersionSubstitute& sub, const TransmissionOptions& opt) {
  medium.validate();
  if (medium.layers.empty()) throw ConfigError("transmission_scan: medium has no layers");
  for (const auto& p : medium.protocols)
    if (!p.is_static()) throw ConfigError("transmission_scan: medium must be static");
  const double a = medium.layers.front().x_start;
  const double b = medium.layers.back().x_end;
  const double x_left = a - opt.probe_margin;
  const double x_right = b + opt.probe_margin;
  PulseSpec pulse;
  pulse.sigma = opt.pulse_sigma;
  pulse.center_x0 = x_left - opt.probe_margin - 4.0 * opt.pulse_sigma;
  if (pulse.center_x0 - 4.0 * pulse.sigma < grid.x_min + grid.sponge_width ||
      x_right > grid.x_max() - grid.sponge_width)
    throw ConfigError("transmission_scan: grid too small for source, medium and probes");

  double t_max = opt.t_max;
  if (t_max <= 0.0) {
    double delay = 0.0, gmin = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < medium.layers.size(); ++l) {
      const Layer& L = medium.layers[l];
      // Without a control field there is no slow light; the decay term bounds the duration.
      const double v = medium.control(static_cast<int>(l), 0.0) > 0.0
                           ? std::max(medium.velocity(static_cast<int>(l), 0.0), 1e-6)
                           : 1.0;
      delay += (L.x_end - L.x_start) / v;
      if (L.gamma_e > 0.0) gmin = std::min(gmin, L.gamma_e);
    }
    t_max = (x_right - pulse.center_x0) + 3.0 * delay + 20.0 * pulse.sigma;
    if (std::isfinite(gmin)) t_max += 16.0 / gmin;
  }
  auto index_of = [&](double x) {
    return static_cast<std::size_t>(std::clamp(std::lround((x - grid.x_min) / grid.dx), 0L,
                                               static_cast<long>(grid.n_points) - 1));
  };
  const std::size_t il = index_of(x_left), ir = index_of(x_right);

  MediumProfile vacuum = medium;
  for (auto& L : vacuum.layers) L.coupling_D = 0.0;
  const ProbeRecord med = record_probes(grid, medium, sub, pulse, il, ir, t_max);
  const ProbeRecord ref = record_probes(grid, vacuum, sub, pulse, il, ir, t_max);
  if (med.residual > opt.residual_tol)
    throw NonConverged("transmission_scan: " + std::to_string(med.residual) +
                       " of the pulse energy still inside the domain at t_max");

  std::vector<cplx> refl(med.left.size());
  for (std::size_t k = 0; k < refl.size(); ++k) refl[k] = med.left[k] - ref.left[k];

  std::vector<TransmissionPoint> out;
  out.reserve(detunings.size());
  for (double d : detunings) {
    const cplx inc_r = spectrum(ref.t, ref.right, d);
    const cplx inc_l = spectrum(ref.t, ref.left, d);
    TransmissionPoint p;
    p.detuning = d;
    p.transmittance = std::norm(spectrum(med.t, med.right, d) / inc_r);
    p.reflectance = std::norm(spectrum(med.t, refl, d) / inc_l);
    out.push_back(p);
  }
  return out;
}

Grid scan_grid(const MediumProfile& medium, const TransmissionOptions& opt, double dx, double dt,
               double sponge_width) {
  medium.validate();
  if (medium.layers.empty()) throw ConfigError("scan_grid: medium has no layers");
  const double a = medium.layers.front().x_start - 2.0 * opt.probe_margin - 8.0 * opt.pulse_sigma;
  const double b = medium.layers.back().x_end + 2.0 * opt.probe_margin;
  if (dt <= 0.0) dt = default_time_step(medium);
  return Grid::covering(a - sponge_width - 20.0, b + sponge_width + 20.0, dx, dt, sponge_width);
}

GaussianWindowFit fit_transmission_window(std::span<const TransmissionPoint> pts, double core_level) {
  double t0 = 0.0, best = std::numeric_limits<double>::infinity();
  for (const auto& p : pts)
    if (std::abs(p.detuning) < best) {
      best = std::abs(p.detuning);
      t0 = p.transmittance;
    }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const auto& p : pts) {
    if (p.transmittance < core_level * t0 || p.transmittance <= 0.0) continue;
    const double x = p.detuning * p.detuning, y = std::log(p.transmittance);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  GaussianWindowFit fit;
  fit.points = n;
  const double den = n * sxx - sx * sx;
  if (n < 3 || den <= 0.0) throw NonConverged("fit_transmission_window: not enough core samples");
  const double slope = (n * sxy - sx * sy) / den;
  const double icpt = (sy - slope * sx) / n;
  if (slope >= 0.0) throw NonConverged("fit_transmission_window: transmission does not decay");
  fit.width = std::sqrt(-1.0 / (2.0 * slope));
  fit.peak = std::exp(icpt);
  return fit;
}

}  // namespace eit
