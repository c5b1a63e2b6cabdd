#include "eitchain/dispersion.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "eitchain/error.hpp"

namespace eit {

namespace {

constexpr double kDegeneracyTol = 1e-9;

double sqr(double x) { return x * x; }

}  // namespace

void EitParams::validate() const {
  if (!(coupling_D >= 0.0)) throw ConfigError("coupling_D must be >= 0");
  if (!(gamma_e >= 0.0)) throw ConfigError("gamma_e must be >= 0");
  if (!(gamma_m >= 0.0)) throw ConfigError("gamma_m must be >= 0");
  if (!(omega_c_rabi >= 0.0)) throw ConfigError("omega_c_rabi must be >= 0");
  if (!(omega_p > 0.0)) throw ConfigError("omega_p must be > 0");
}

EitParams EitParams::probed_at(double detuning) const {
  EitParams q = *this;
  q.delta_e -= detuning;
  q.delta_R -= detuning;
  return q;
}

double DispersionSubstitute::f(double k) const {
  if (shape == DispersionShape::Quadratic) return k * k;
  const double b = half_bandwidth;
  return 1.0 + 2.0 * b * std::erf(std::sqrt(std::numbers::pi) * (std::abs(k) - 1.0) / (2.0 * b));
}

double DispersionSubstitute::df_dk(double k) const {
  if (shape == DispersionShape::Quadratic) return 2.0 * k;
  const double b = half_bandwidth;
  const double s = std::sqrt(std::numbers::pi) / (2.0 * b);
  const double q = std::abs(k) - 1.0;
  const double d = 2.0 * b * (2.0 / std::sqrt(std::numbers::pi)) * s * std::exp(-sqr(s * q));
  return k < 0.0 ? -d : d;
}

double f_of_k(const DispersionSubstitute& sub, double k) { return sub.f(k); }

cplx susceptibility(const EitParams& p) {
  const double W = sqr(0.5 * p.omega_c_rabi);
  const cplx raman(p.delta_R, -0.5 * p.gamma_m);
  cplx den(p.delta_e, -0.5 * p.gamma_e);
  if (raman == cplx(0.0)) {
    // Dark resonance: the dressing term diverges and chi vanishes.
    if (W > 0.0) return cplx(0.0);
  } else {
    den -= W / raman;
  }
  if (den == cplx(0.0))
    throw DegenerateDenominator("susceptibility: vanishing denominator (undressed, unbroadened resonance)");
  return 2.0 * p.coupling_D * p.omega_p / den;
}

namespace {

Eigen::Matrix3cd mb_matrix(const EitParams& p, const DispersionSubstitute& sub, double k) {
  const double wp = p.omega_p;
  const double g = std::sqrt(p.coupling_D) * wp;
  Eigen::Matrix3cd H = Eigen::Matrix3cd::Zero();
  H(0, 0) = wp * (sub.f(k) + 1.0) / 2.0;
  H(1, 1) = cplx(wp + p.delta_e, -0.5 * p.gamma_e);
  H(2, 2) = cplx(wp + p.delta_R, -0.5 * p.gamma_m);
  H(0, 1) = H(1, 0) = -g;
  H(1, 2) = H(2, 1) = 0.5 * p.omega_c_rabi;
  return H;
}

PolaritonPoint decompose(const EitParams& p, const DispersionSubstitute& sub, double k) {
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(mb_matrix(p, sub, k));
  if (es.info() != Eigen::Success) throw NumericalFailure("polariton_branches: eigensolver failed");
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return es.eigenvalues()(a).real() < es.eigenvalues()(b).real();
  });
  PolaritonPoint pt;
  pt.k = k;
  for (int b = 0; b < 3; ++b) {
    const int j = order[b];
    pt.omega_complex[b] = es.eigenvalues()(j);
    const Eigen::Vector3cd v = es.eigenvectors().col(j).normalized();
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) {
      pt.vectors[b][c] = v(c);
      sum += std::norm(v(c));
    }
    for (int c = 0; c < 3; ++c) pt.weights[b][c] = std::norm(v(c)) / sum;
  }
  const double tol = kDegeneracyTol * p.omega_p;
  for (int b = 0; b + 1 < 3; ++b)
    if (std::abs(pt.omega_complex[b + 1] - pt.omega_complex[b]) < tol) pt.degenerate = true;
  return pt;
}

}  // namespace

PolaritonPoint polariton_branches(const EitParams& p, const DispersionSubstitute& sub, double k) {
  p.validate();
  return decompose(p, sub, k);
}

std::vector<PolaritonPoint> band_scan(const EitParams& p, const DispersionSubstitute& sub,
                                      std::span<const double> ks) {
  p.validate();
  std::vector<PolaritonPoint> out;
  out.reserve(ks.size());
  for (double k : ks) {
    PolaritonPoint pt = decompose(p, sub, k);
    if (pt.degenerate && !out.empty()) {
      // Pick the branch permutation that best continues the previous vectors.
      const PolaritonPoint& prev = out.back();
      std::array<int, 3> perm{0, 1, 2}, best = perm;
      double best_score = -1.0;
      do {
        double s = 0.0;
        for (int b = 0; b < 3; ++b) {
          cplx ov = 0.0;
          for (int c = 0; c < 3; ++c) ov += std::conj(prev.vectors[b][c]) * pt.vectors[perm[b]][c];
          s += std::norm(ov);
        }
        if (s > best_score) {
          best_score = s;
          best = perm;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      PolaritonPoint re = pt;
      for (int b = 0; b < 3; ++b) {
        re.omega_complex[b] = pt.omega_complex[best[b]];
        re.weights[b] = pt.weights[best[b]];
        re.vectors[b] = pt.vectors[best[b]];
      }
      pt = re;
    }
    out.push_back(pt);
  }
  return out;
}

GroupVelocity group_velocity_resonance(const EitParams& p) {
  if (p.omega_c_rabi <= 0.0) return {0.0, true};
  const double W = sqr(0.5 * p.omega_c_rabi);
  return {1.0 / (1.0 + p.coupling_D * sqr(p.omega_p) / W), false};
}

double control_for_group_velocity(double v, double coupling_D, double omega_p) {
  if (!(v > 0.0 && v < 1.0)) throw ConfigError("group velocity must lie in (0, c)");
  return 2.0 * omega_p * std::sqrt(coupling_D * v / (1.0 - v));
}

double group_velocity_slope(double omega_c, double coupling_D, double omega_p) {
  const double a = 4.0 * coupling_D * sqr(omega_p);
  const double s = sqr(omega_c) + a;
  return 2.0 * a * omega_c / (s * s);
}

BranchTransport branch_velocity_and_decay(const PolaritonPoint& pt, const EitParams& p, int branch) {
  return {pt.weights[branch][0], p.gamma_e * pt.weights[branch][1]};
}

cplx curvature_resonance(const EitParams& p) {
  const GroupVelocity gv = group_velocity_resonance(p);
  if (gv.zero_control) throw ZeroControlField("curvature_resonance: control field is zero");
  const double W = sqr(0.5 * p.omega_c_rabi);
  return cplx(0.0, -p.gamma_e * p.coupling_D * sqr(p.omega_p) / (W * W) * gv.v * gv.v * gv.v);
}

double diffusion_coefficient(const EitParams& p) {
  if (p.coupling_D <= 0.0) return 0.0;
  const GroupVelocity gv = group_velocity_resonance(p);
  return gv.v * p.gamma_e / (p.coupling_D * sqr(p.omega_p));
}

Reflectivity reflectivity_from_chi(cplx chi, double omega, double omega_p) {
  const double u = 1.0 + 2.0 * (omega - omega_p) / omega_p;
  const cplx k = omega_p * std::sqrt(cplx(u, 0.0));
  const cplx rad = 1.0 + chi + 2.0 * (omega - omega_p) / omega_p;
  cplx kp = omega_p * std::sqrt(rad);
  if (kp.imag() < 0.0) kp = -kp;
  Reflectivity out;
  out.evanescent = rad.real() < 0.0;
  out.r = (1.0 - kp / k) / (1.0 + kp / k);
  return out;
}

Reflectivity reflectivity(const EitParams& p, double omega) {
  return reflectivity_from_chi(susceptibility(p.probed_at(omega - p.omega_p)), omega, p.omega_p);
}

double transmission_window(const EitParams& p, double length) {
  const double W = sqr(0.5 * p.omega_c_rabi);
  return W / std::sqrt(2.0 * p.gamma_e * p.coupling_D * sqr(p.omega_p)) * std::sqrt(1.0 / length);
}

double adiabaticity_margin(double ramp_rate, const EitParams& p) {
  return ramp_rate / (p.coupling_D * sqr(p.omega_p));
}

void write_band_table(std::ostream& os, std::span<const PolaritonPoint> pts) {
  os << "# k re_lower re_dark re_upper im_lower im_dark im_upper";
  const char* names[3] = {"lower", "dark", "upper"};
  const char* comps[3] = {"ph", "eg", "mg"};
  for (auto* n : names)
    for (auto* c : comps) os << ' ' << 'w' << c << '_' << n;
  os << '\n';
  os.precision(12);
  for (const auto& pt : pts) {
    os << pt.k;
    for (int b = 0; b < 3; ++b) os << ' ' << pt.omega_complex[b].real();
    for (int b = 0; b < 3; ++b) os << ' ' << pt.omega_complex[b].imag();
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) os << ' ' << pt.weights[b][c];
    os << '\n';
  }
}

}  // namespace eit
