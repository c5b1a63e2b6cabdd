#include <algorithm>
#include <cmath>

#include "eitchain/effective_flow.hpp"
#include "eitchain/error.hpp"

namespace eit {

namespace {

template <class F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double rel_tol = 1e-10) {
  if (b == a) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double scale = std::max(std::abs(whole), 1e-300);
  return simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol * scale, 40);
}

}  // namespace

DefectGeometry DefectGeometry::from_protocol(double L_d, const ModulationProtocol& p, double coupling_D) {
  DefectGeometry g;
  g.L_d = L_d;
  g.breakpoints = p.breakpoints();
  if (p.quantity == ProtocolQuantity::GroupVelocity) {
    g.v = [p](double t) { return p.value(t); };
  } else {
    g.v = [p, coupling_D](double t) {
      EitParams e;
      e.coupling_D = coupling_D;
      e.omega_c_rabi = p.value(t);
      return coupling_D == 0.0 ? 1.0 : group_velocity_resonance(e).v;
    };
  }
  return g;
}

AnalyticDefect::AnalyticDefect(std::function<double(double)> I0, DefectGeometry geom, double root_tol)
    : I0_(std::move(I0)), geom_(std::move(geom)), tol_(root_tol) {
  if (!geom_.v) throw ConfigError("analytic defect: velocity schedule missing");
  knots_.push_back(0.0);
  for (double b : geom_.breakpoints)
    if (b > 0.0) knots_.push_back(b);
  std::sort(knots_.begin(), knots_.end());
  knots_.erase(std::unique(knots_.begin(), knots_.end()), knots_.end());
  knot_P_.assign(knots_.size(), 0.0);
  for (std::size_t k = 1; k < knots_.size(); ++k)
    knot_P_[k] = knot_P_[k - 1] + adaptive_simpson(geom_.v, knots_[k - 1], knots_[k]);
}

double AnalyticDefect::cumulative(double t) const {
  if (t <= 0.0) return -adaptive_simpson(geom_.v, t, 0.0);
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
  return knot_P_[k] + adaptive_simpson(geom_.v, knots_[k], t);
}

double AnalyticDefect::travel(double a, double b) const { return cumulative(b) - cumulative(a); }

double AnalyticDefect::operator()(double x, double t) const {
  const double Ld = geom_.L_d;
  const auto& v = geom_.v;
  const double v0 = v(0.0);
  const double Pt = cumulative(t);
  if (x < 0.0) return I0_(x - Pt) * v(t) / v0;
  if (x < Ld) {
    const double tr = t - x;
    return I0_(-cumulative(tr)) * v(tr) / v0;
  }
  const double front = Ld + Pt - cumulative(Ld);
  if (x < front) {
    // Re-entry time t_d into the right bulk: x = L_d + P(t) - P(t_d).
    double lo = Ld, hi = t;
    auto g = [&](double td) { return Ld + Pt - cumulative(td) - x; };
    if (!(g(lo) >= 0.0 && g(hi) <= 0.0))
      throw RootNotBracketed("analytic defect: re-entry time not bracketed at x = " + std::to_string(x));
    while (hi - lo > tol_) {
      const double mid = 0.5 * (lo + hi);
      if (g(mid) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    const double td = 0.5 * (lo + hi);
    const double t0 = td - Ld;
    return I0_(-cumulative(t0)) * v(t0) / v0 * v(t) / v(td);
  }
  if (x < Ld + Pt) return 0.0;
  return I0_(x - Pt) * v(t) / v0;
}

double analytic_defect(const std::function<double(double)>& I0, const DefectGeometry& geom, double x, double t) {
  return AnalyticDefect(I0, geom)(x, t);
}

}  // namespace eit
