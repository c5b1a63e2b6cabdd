#pragma once

#include <span>
#include <vector>

#include "eitchain/dispersion.hpp"
#include "eitchain/grid.hpp"
#include "eitchain/medium.hpp"

namespace eit {

struct TransmissionOptions {
  // Vacuum length of the broadband probe pulse.
  double pulse_sigma = 8.0;
  // Gap between the probes and the outermost layer edges.
  double probe_margin = 40.0;
  // 0 selects an automatic duration from the group delay and the slowest decay.
  double t_max = 0.0;
  // Field energy left in the interior at t_max, relative to the launched one.
  double residual_tol = 1e-3;
};

struct TransmissionPoint {
  double detuning = 0.0;
  double transmittance = 0.0;
  double reflectance = 0.0;
};

// Intensity transmission and reflection of the static medium at probe
// frequencies omega_p + detuning.  A broadband pulse is launched once through
// the medium and once through vacuum; both are recorded at probe points on
// either side and Fourier analysed at the requested detunings.
std::vector<TransmissionPoint> transmission_scan(const Grid& grid, const MediumProfile& medium,
                                                 std::span<const double> detunings,
                                                 const DispersionSubstitute& sub = DispersionSubstitute::erf(),
                                                 const TransmissionOptions& opt = {});

// Grid holding source, medium, probes and absorbing sponges for a scan.
Grid scan_grid(const MediumProfile& medium, const TransmissionOptions& opt = {}, double dx = 1.0, double dt = 0.0,
               double sponge_width = 200.0);

struct GaussianWindowFit {
  double width = 0.0;     // Delta omega with |T|^2 ~ T0 exp(-Delta^2 / (2 width^2))
  double peak = 0.0;      // T0
  std::size_t points = 0; // samples used
};

// Least-squares fit of log|T|^2 against Delta^2 over the core of the window
// where |T|^2 >= core_level * |T(0)|^2.
GaussianWindowFit fit_transmission_window(std::span<const TransmissionPoint> pts, double core_level = 0.9);

}  // namespace eit
