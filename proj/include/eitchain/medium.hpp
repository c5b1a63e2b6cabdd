#pragma once

#include <string>
#include <vector>

#include "eitchain/dispersion.hpp"
#include "eitchain/protocol.hpp"

namespace eit {

struct Layer {
  double x_start = 0.0;
  double x_end = 0.0;
  double coupling_D = 0.0;
  double gamma_e = 0.0;
  double gamma_m = 0.0;
  double delta_e = 0.0;
  double delta_R = 0.0;
  int protocol = 0;
  std::string name;
};

// Ordered, non-overlapping EIT layers in vacuum.  Each layer is driven by one
// of the protocols; several layers may share a protocol.
struct MediumProfile {
  std::vector<Layer> layers;
  std::vector<ModulationProtocol> protocols;
  double interface_smoothing = 0.0;

  void validate() const;
  // Index of the layer containing x, -1 in vacuum.
  int layer_at(double x) const;
  // Fraction of atoms of layer l present at x, in [0, 1].
  double occupation(int l, double x) const;

  double control(int l, double t) const;
  double control_rate(int l, double t) const;
  double velocity(int l, double t) const;
  double velocity_rate(int l, double t) const;
  double max_velocity(int l) const;
  double max_control() const;
  double max_coupling() const;
  double max_control_rate(int l) const;
  EitParams params(int l, double t) const;
  std::string layer_label(int l) const;
};

}  // namespace eit
