#include "eitchain/mb_solver.hpp"

#include <fftw3.h>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "eitchain/error.hpp"

namespace eit {

void Grid::validate() const {
  if (n_points < 4 || !std::has_single_bit(n_points))
    throw ConfigError("grid: n_points must be a power of two >= 4");
  if (!(dx > 0.0)) throw ConfigError("grid: dx must be > 0");
  if (!(dt > 0.0)) throw ConfigError("grid: dt must be > 0");
  if (sponge_width < 0.0 || 2.0 * sponge_width >= length())
    throw ConfigError("grid: sponge does not fit in the domain");
}

Grid Grid::covering(double x_lo, double x_hi, double dx_max, double dt, double sponge_width) {
  const double span = x_hi - x_lo;
  if (!(span > 0.0) || !(dx_max > 0.0)) throw ConfigError("grid: empty extent");
  std::size_t n = std::bit_ceil(static_cast<std::size_t>(std::ceil(span / dx_max)));
  n = std::max<std::size_t>(n, 4);
  Grid g;
  g.x_min = x_lo;
  g.n_points = n;
  g.dx = span / static_cast<double>(n);
  g.dt = dt;
  g.sponge_width = sponge_width;
  return g;
}

double polariton_number(const FieldState& s, double dx) {
  double n = 0.0;
  for (std::size_t i = 0; i < s.E.size(); ++i)
    n += std::norm(s.E[i]) + std::norm(s.rho_eg[i]) + std::norm(s.rho_mg[i]);
  return n * dx;
}

DiagnosticSample diagnose(const FieldState& s, const Grid& g) {
  DiagnosticSample d;
  d.t = s.t;
  const std::size_t n = s.E.size();
  std::size_t imax = 0;
  double pmax = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e2 = std::norm(s.E[i]);
    d.w_em += e2;
    d.w_at += std::norm(s.rho_eg[i]);
    d.n_pol += e2 + std::norm(s.rho_eg[i]) + std::norm(s.rho_mg[i]);
    if (e2 > pmax) {
      pmax = e2;
      imax = i;
    }
  }
  d.w_em *= g.dx;
  d.w_at *= g.dx;
  d.n_pol *= g.dx;
  const double ym = std::norm(s.E[(imax + n - 1) % n]);
  const double yp = std::norm(s.E[(imax + 1) % n]);
  const double den = ym - 2.0 * pmax + yp;
  double off = 0.0;
  if (den < 0.0) off = std::clamp(0.5 * (ym - yp) / den, -0.5, 0.5);
  d.x_peak = g.x(imax) + off * g.dx;
  d.peak = pmax - 0.25 * (ym - yp) * off;
  return d;
}

double default_time_step(const MediumProfile& m) {
  double dt = 1.0;
  const double om = m.max_control();
  if (om > 0.0) dt = std::min(dt, 0.1 / om);
  const double D = m.max_coupling();
  if (D > 0.0) dt = std::min(dt, 0.05 / std::sqrt(D));
  for (const auto& p : m.protocols)
    for (const Segment& s : p.segments)
      if (s.shape != RampShape::Hold && s.t_end > s.t_start) dt = std::min(dt, (s.t_end - s.t_start) / 50.0);
  return dt;
}

double carrier_wave_vector(const DispersionSubstitute& sub, double delta) {
  const double target = 1.0 + 2.0 * delta;
  if (sub.shape == DispersionShape::Quadratic) {
    if (target <= 0.0) throw ConfigError("carrier detuning below the free-photon band");
    return std::sqrt(target);
  }
  if (std::abs(delta) >= sub.half_bandwidth)
    throw ConfigError("carrier detuning outside the Erf dispersion band");
  double lo = 1.0 - 10.0 * sub.half_bandwidth, hi = 1.0 + 10.0 * sub.half_bandwidth;
  lo = std::max(lo, 0.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sub.f(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct MbSolver::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  std::vector<cplx> buffer;
  ~Plans() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

MbSolver::MbSolver(Grid grid, MediumProfile medium, DispersionSubstitute sub)
    : grid_(grid), medium_(std::move(medium)), sub_(sub), plans_(std::make_unique<Plans>()) {
  grid_.validate();
  medium_.validate();
  const std::size_t n = grid_.n_points;
  omega_q_.resize(n);
  const double dq = 2.0 * std::numbers::pi / grid_.length();
  for (std::size_t j = 0; j < n; ++j) {
    const double m = j < n / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
    omega_q_[j] = sub_.envelope_frequency(1.0 + m * dq);
  }
  cell_layer_.assign(n, -1);
  cell_occ_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid_.x(i);
    for (std::size_t l = 0; l < medium_.layers.size(); ++l) {
      const double o = medium_.occupation(static_cast<int>(l), x);
      if (o > cell_occ_[i]) {
        cell_occ_[i] = o;
        cell_layer_[i] = static_cast<int>(l);
      }
    }
  }
  sponge_.assign(n, 0.0);
  if (grid_.sponge_width > 0.0) {
    const double w = grid_.sponge_width;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = grid_.x(i);
      const double d = std::max(grid_.x_min + w - x, x - (grid_.x_max() - w));
      if (d > 0.0) sponge_[i] = grid_.sponge_strength * (d / w) * (d / w);
    }
  }
  plans_->buffer.resize(n);
  auto* buf = reinterpret_cast<fftw_complex*>(plans_->buffer.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->fwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, flags);
  plans_->bwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, flags);
}

MbSolver::~MbSolver() = default;

FieldState MbSolver::init_state(const PulseSpec& pulse) const {
  if (!(pulse.sigma > 0.0)) throw ConfigError("pulse sigma must be > 0");
  const double reach = 4.0 * pulse.sigma;
  for (std::size_t l = 0; l < medium_.layers.size(); ++l) {
    const Layer& L = medium_.layers[l];
    if (L.coupling_D == 0.0) continue;
    if (pulse.center_x0 + reach > L.x_start - medium_.interface_smoothing &&
        pulse.center_x0 - reach < L.x_end + medium_.interface_smoothing)
      throw PulseOverlapsMedium("pulse support overlaps " + medium_.layer_label(static_cast<int>(l)));
  }
  if (pulse.center_x0 - reach < grid_.x_min + grid_.sponge_width ||
      pulse.center_x0 + reach > grid_.x_max() - grid_.sponge_width)
    throw PulseOverlapsMedium("pulse support leaves the computational domain or enters a sponge");
  const double k0 = carrier_wave_vector(sub_, pulse.detuning);
  const double kshift = pulse.direction >= 0 ? k0 - 1.0 : -k0 - 1.0;
  const std::size_t n = grid_.n_points;
  FieldState s;
  s.E.resize(n);
  s.rho_eg.assign(n, cplx(0.0));
  s.rho_mg.assign(n, cplx(0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid_.x(i);
    const double u = (x - pulse.center_x0) / pulse.sigma;
    const double a = pulse.amplitude * std::exp(-0.5 * u * u);
    s.E[i] = kshift == 0.0 ? cplx(a, 0.0) : a * std::polar(1.0, kshift * x);
  }
  s.n_pol0 = polariton_number(s, grid_.dx);
  return s;
}

FieldState MbSolver::init_dark_polariton(const PulseSpec& pulse, double t0) const {
  const int l = medium_.layer_at(pulse.center_x0);
  if (l < 0) throw ConfigError("dark-polariton pulse must be centred inside a layer");
  const Layer& L = medium_.layers[l];
  const double reach = 4.0 * pulse.sigma;
  if (pulse.center_x0 - reach < L.x_start || pulse.center_x0 + reach > L.x_end)
    throw ConfigError("dark-polariton pulse does not fit in " + medium_.layer_label(l));
  const double om = medium_.control(l, t0);
  if (om <= 0.0) throw ZeroControlField("dark-polariton initialisation needs a control field");
  const std::size_t n = grid_.n_points;
  FieldState s;
  s.t = t0;
  s.E.assign(n, cplx(0.0));
  s.rho_eg.assign(n, cplx(0.0));
  s.rho_mg.assign(n, cplx(0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (grid_.x(i) - pulse.center_x0) / pulse.sigma;
    s.E[i] = pulse.amplitude * std::exp(-0.5 * u * u);
  }
  // Project every Fourier component onto the middle (dark) eigenvector of the
  // lossless homogeneous problem, keeping the photonic amplitude.
  auto* e = reinterpret_cast<fftw_complex*>(s.E.data());
  fftw_execute_dft(plans_->fwd, e, e);
  const double g = std::sqrt(L.coupling_D);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    Eigen::Matrix3d H;
    H << omega_q_[j], -g, 0.0, -g, L.delta_e, 0.5 * om, 0.0, 0.5 * om, L.delta_R;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(H);
    const Eigen::Vector3d v = es.eigenvectors().col(1);
    s.E[j] *= inv_n;
    if (std::abs(v(0)) < 1e-12) {
      s.E[j] = 0.0;
      continue;
    }
    s.rho_eg[j] = s.E[j] * (v(1) / v(0));
    s.rho_mg[j] = s.E[j] * (v(2) / v(0));
  }
  for (auto* arr : {&s.E, &s.rho_eg, &s.rho_mg}) {
    auto* d = reinterpret_cast<fftw_complex*>(arr->data());
    fftw_execute_dft(plans_->bwd, d, d);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (cell_layer_[i] != l) s.rho_eg[i] = s.rho_mg[i] = 0.0;
  s.n_pol0 = polariton_number(s, grid_.dx);
  return s;
}

void MbSolver::check_stability(double dt) const {
  const double rate = std::sqrt(medium_.max_coupling() + 0.25 * std::pow(medium_.max_control(), 2)) +
                      (sub_.shape == DispersionShape::ErfShaped ? sub_.half_bandwidth : 0.0);
  if (dt * rate > 1.0)
    throw CflViolation("time step " + std::to_string(dt) + " exceeds the splitting bound " +
                       std::to_string(1.0 / rate));
}

const std::vector<cplx>& MbSolver::phase_for(double h) {
  for (auto& c : cache_)
    if (c.h == h && !c.phase.empty()) return c.phase;
  PhaseCache& c = cache_[cache_next_];
  cache_next_ = 1 - cache_next_;
  c.h = h;
  c.phase.resize(omega_q_.size());
  const double norm = 1.0 / static_cast<double>(omega_q_.size());
  for (std::size_t j = 0; j < omega_q_.size(); ++j) c.phase[j] = norm * std::polar(1.0, -omega_q_[j] * h);
  return c.phase;
}

void MbSolver::kinetic(FieldState& s, double h) {
  auto* data = reinterpret_cast<fftw_complex*>(s.E.data());
  fftw_execute_dft(plans_->fwd, data, data);
  const auto& ph = phase_for(h);
  for (std::size_t j = 0; j < ph.size(); ++j) s.E[j] *= ph[j];
  fftw_execute_dft(plans_->bwd, data, data);
}

namespace {

Eigen::Matrix3cd local_propagator(const Layer& L, double occupation, double omega_c, double dt) {
  const double g = std::sqrt(L.coupling_D * occupation);
  Eigen::Matrix3cd H = Eigen::Matrix3cd::Zero();
  H(0, 1) = H(1, 0) = -g;
  H(1, 1) = cplx(L.delta_e, -0.5 * L.gamma_e);
  H(1, 2) = H(2, 1) = 0.5 * omega_c;
  H(2, 2) = cplx(L.delta_R, -0.5 * L.gamma_m);
  const Eigen::Matrix3cd M = (cplx(0.0, -dt) * H).exp();
  return M;
}

}  // namespace

void MbSolver::local(FieldState& s, double t_mid, double dt) {
  const std::size_t n = grid_.n_points;
  std::vector<Eigen::Matrix3cd> full(medium_.layers.size());
  for (std::size_t l = 0; l < medium_.layers.size(); ++l)
    full[l] = local_propagator(medium_.layers[l], 1.0, medium_.control(static_cast<int>(l), t_mid), dt);
  for (std::size_t i = 0; i < n; ++i) {
    const int l = cell_layer_[i];
    if (l >= 0 && medium_.layers[l].coupling_D > 0.0) {
      Eigen::Matrix3cd part;
      const Eigen::Matrix3cd* U = &full[l];
      if (cell_occ_[i] < 1.0) {
        part = local_propagator(medium_.layers[l], cell_occ_[i], medium_.control(l, t_mid), dt);
        U = &part;
      }
      const cplx e = s.E[i], a = s.rho_eg[i], b = s.rho_mg[i];
      s.E[i] = (*U)(0, 0) * e + (*U)(0, 1) * a + (*U)(0, 2) * b;
      s.rho_eg[i] = (*U)(1, 0) * e + (*U)(1, 1) * a + (*U)(1, 2) * b;
      s.rho_mg[i] = (*U)(2, 0) * e + (*U)(2, 1) * a + (*U)(2, 2) * b;
    }
    if (sponge_[i] > 0.0) {
      const double damp = std::exp(-sponge_[i] * dt);
      s.E[i] *= damp;
      s.rho_eg[i] *= damp;
      s.rho_mg[i] *= damp;
    }
  }
}

void MbSolver::step(FieldState& s, double dt) {
  kinetic(s, 0.5 * dt);
  local(s, s.t + 0.5 * dt, dt);
  kinetic(s, 0.5 * dt);
  s.t += dt;
}

void MbSolver::check_finite(const FieldState& s) {
  const double n = polariton_number(s, grid_.dx);
  if (!std::isfinite(n)) {
    failure_state_ = s;
    throw NumericalFailure("non-finite field at t = " + std::to_string(s.t), s.t);
  }
}

RunResult MbSolver::run(FieldState s, double t_max, std::span<const double> snapshot_times, int diag_every) {
  if (!(t_max > s.t)) throw ConfigError("run: t_max must exceed the initial time");
  const double dt = grid_.dt;
  check_stability(dt);
  std::vector<double> targets;
  for (double t : snapshot_times)
    if (t >= s.t && t <= t_max) targets.push_back(t);
  std::sort(targets.begin(), targets.end());
  std::vector<bool> is_snap(targets.size(), true);
  if (targets.empty() || targets.back() < t_max) {
    targets.push_back(t_max);
    is_snap.push_back(false);
  }

  RunResult out;
  out.diagnostics.push_back(diagnose(s, grid_));
  if (observer) observer(s);
  if (!targets.empty() && targets.front() == s.t && is_snap.front()) out.snapshots.push_back(s);

  bool synced = true;
  long count = 0;
  auto sync = [&] {
    if (!synced) {
      kinetic(s, 0.5 * dt);
      synced = true;
    }
  };
  const double eps = 1e-9 * dt;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const double T = targets[k];
    while (T - s.t > eps) {
      const double h = T - s.t;
      if (h < dt * (1.0 - 1e-12)) {
        sync();
        step(s, h);
      } else {
        kinetic(s, synced ? 0.5 * dt : dt);
        local(s, s.t + 0.5 * dt, dt);
        s.t += dt;
        synced = false;
      }
      ++count;
      if (diag_every > 0 && count % diag_every == 0) {
        sync();
        check_finite(s);
        out.diagnostics.push_back(diagnose(s, grid_));
        if (observer) observer(s);
      }
    }
    sync();
    s.t = T;
    check_finite(s);
    if (is_snap[k] && (out.snapshots.empty() || out.snapshots.back().t != T)) out.snapshots.push_back(s);
  }
  if (out.diagnostics.back().t != s.t) {
    out.diagnostics.push_back(diagnose(s, grid_));
    if (observer) observer(s);
  }
  if (out.snapshots.empty() || out.snapshots.back().t != s.t) out.snapshots.push_back(s);
  return out;
}

}  // namespace eit
