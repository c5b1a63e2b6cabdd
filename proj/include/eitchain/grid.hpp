#pragma once

#include <cstddef>

namespace eit {

// Uniform periodic grid for the spectral field solver.  Sponges of width
// sponge_width sit inside both ends of [x_min, x_max).
struct Grid {
  double x_min = 0.0;
  std::size_t n_points = 0;
  double dx = 1.0;
  double dt = 0.5;
  double sponge_width = 0.0;
  double sponge_strength = 0.05;

  double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }
  double x_max() const { return x_min + static_cast<double>(n_points) * dx; }
  double length() const { return static_cast<double>(n_points) * dx; }
  void validate() const;

  // Smallest power-of-two grid covering [x_lo, x_hi) with spacing <= dx_max.
  static Grid covering(double x_lo, double x_hi, double dx_max, double dt, double sponge_width = 0.0);
};

}  // namespace eit
