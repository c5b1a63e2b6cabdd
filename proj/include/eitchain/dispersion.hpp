#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

namespace eit {

using cplx = std::complex<double>;

// Light-matter parameters of a Lambda-type EIT medium.  Frequencies are in
// units of omega_p unless omega_p itself is set to a physical value, in which
// case all of them share that unit.  Lengths are in 1/k_p and c = 1.
struct EitParams {
  double coupling_D = 0.0;
  double omega_p = 1.0;
  double gamma_e = 0.0;
  double gamma_m = 0.0;
  double omega_c_rabi = 0.0;
  double delta_e = 0.0;
  double delta_R = 0.0;

  void validate() const;
  // Same medium seen by a probe detuned by `detuning` from omega_p.
  EitParams probed_at(double detuning) const;
};

enum class DispersionShape { Quadratic, ErfShaped };

// Replacement of c^2 k^2 in the field equation.  The Erf form is linear
// around +-k_p with slope 2 omega_p^2/k_p and saturates at omega_p^2 (1 +- 2b)
// where b is the half-bandwidth in units of omega_p.
struct DispersionSubstitute {
  DispersionShape shape = DispersionShape::ErfShaped;
  double half_bandwidth = 0.5;

  static DispersionSubstitute erf(double half_bandwidth = 0.5) {
    return {DispersionShape::ErfShaped, half_bandwidth};
  }
  static DispersionSubstitute quadratic() { return {DispersionShape::Quadratic, 0.0}; }

  // Normalized units: k in k_p, result in omega_p^2.
  double f(double k) const;
  double df_dk(double k) const;
  // Free-photon envelope frequency (f(k) - 1)/2 relative to the carrier.
  double envelope_frequency(double k) const { return 0.5 * (f(k) - 1.0); }
};

double f_of_k(const DispersionSubstitute& sub, double k);

cplx susceptibility(const EitParams& p);

enum Branch : int { kLower = 0, kDark = 1, kUpper = 2 };

struct PolaritonPoint {
  double k = 0.0;
  std::array<cplx, 3> omega_complex{};
  // weights[b] = {photon, excited coherence, metastable coherence}
  std::array<std::array<double, 3>, 3> weights{};
  std::array<std::array<cplx, 3>, 3> vectors{};
  bool degenerate = false;
};

PolaritonPoint polariton_branches(const EitParams& p, const DispersionSubstitute& sub, double k);

// Band scan with overlap continuation through near-degeneracies.
std::vector<PolaritonPoint> band_scan(const EitParams& p, const DispersionSubstitute& sub,
                                      std::span<const double> ks);

struct GroupVelocity {
  double v = 0.0;
  bool zero_control = false;
};

GroupVelocity group_velocity_resonance(const EitParams& p);
// Inverse of the above: control Rabi frequency giving group velocity v.
double control_for_group_velocity(double v, double coupling_D, double omega_p = 1.0);
// dv/dOmega at fixed D.
double group_velocity_slope(double omega_c, double coupling_D, double omega_p = 1.0);

struct BranchTransport {
  double group_velocity = 0.0;
  double decay_rate = 0.0;
};

BranchTransport branch_velocity_and_decay(const PolaritonPoint& pt, const EitParams& p,
                                          int branch = kDark);

cplx curvature_resonance(const EitParams& p);
// Real diffusion coefficient v_gr c gamma_e / (D omega_p^2) used by the
// effective model.
double diffusion_coefficient(const EitParams& p);

struct Reflectivity {
  cplx r;
  bool evanescent = false;
};

Reflectivity reflectivity(const EitParams& p, double omega);
Reflectivity reflectivity_from_chi(cplx chi, double omega, double omega_p = 1.0);

double transmission_window(const EitParams& p, double length);
double adiabaticity_margin(double ramp_rate, const EitParams& p);

void write_band_table(std::ostream& os, std::span<const PolaritonPoint> pts);

}  // namespace eit
