#include "eitchain/medium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "eitchain/error.hpp"

namespace eit {

std::string MediumProfile::layer_label(int l) const {
  const Layer& L = layers.at(l);
  return L.name.empty() ? "layer " + std::to_string(l) : "'" + L.name + "'";
}

void MediumProfile::validate() const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& L = layers[i];
    const std::string who = layer_label(static_cast<int>(i));
    if (!(L.x_end > L.x_start)) throw ConfigError(who + " has non-positive thickness");
    if (!(L.coupling_D >= 0.0)) throw ConfigError(who + " has negative coupling D");
    if (!(L.gamma_e >= 0.0) || !(L.gamma_m >= 0.0)) throw ConfigError(who + " has negative decay rate");
    if (L.protocol < 0 || L.protocol >= static_cast<int>(protocols.size()))
      throw ConfigError(who + " refers to missing protocol " + std::to_string(L.protocol));
  }
  for (std::size_t i = 0; i < layers.size(); ++i)
    for (std::size_t j = i + 1; j < layers.size(); ++j) {
      const Layer& a = layers[i];
      const Layer& b = layers[j];
      if (a.x_start < b.x_end && b.x_start < a.x_end)
        throw ConfigError("layers " + layer_label(static_cast<int>(i)) + " and " +
                          layer_label(static_cast<int>(j)) + " overlap");
    }
  for (std::size_t i = 1; i < layers.size(); ++i)
    if (layers[i].x_start < layers[i - 1].x_end)
      throw ConfigError("layers " + layer_label(static_cast<int>(i - 1)) + " and " +
                        layer_label(static_cast<int>(i)) + " are not ordered by position");
  for (const auto& p : protocols) p.validate();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const ModulationProtocol& p = protocols[layers[i].protocol];
    if (p.quantity == ProtocolQuantity::GroupVelocity && p.max_value() > 1.0)
      throw ConfigError(layer_label(static_cast<int>(i)) + " is driven above the vacuum light speed");
  }
  if (interface_smoothing < 0.0) throw ConfigError("interface_smoothing must be >= 0");
}

int MediumProfile::layer_at(double x) const {
  for (std::size_t i = 0; i < layers.size(); ++i)
    if (x >= layers[i].x_start && x < layers[i].x_end) return static_cast<int>(i);
  return -1;
}

double MediumProfile::occupation(int l, double x) const {
  const Layer& L = layers.at(l);
  const double w = interface_smoothing;
  if (w <= 0.0) return (x >= L.x_start && x < L.x_end) ? 1.0 : 0.0;
  auto edge = [w](double d) {
    if (d <= -0.5 * w) return 0.0;
    if (d >= 0.5 * w) return 1.0;
    return 0.5 * (1.0 - std::cos(std::numbers::pi * (d + 0.5 * w) / w));
  };
  return edge(x - L.x_start) * edge(L.x_end - x);
}

double MediumProfile::control(int l, double t) const {
  const Layer& L = layers.at(l);
  const ModulationProtocol& p = protocols.at(L.protocol);
  const double v = p.value(t);
  if (p.quantity == ProtocolQuantity::ControlRabi) return v;
  if (v <= 0.0) return 0.0;
  if (L.coupling_D == 0.0) return 0.0;
  return control_for_group_velocity(std::min(v, 1.0 - 1e-15), L.coupling_D);
}

double MediumProfile::control_rate(int l, double t) const {
  const Layer& L = layers.at(l);
  const ModulationProtocol& p = protocols.at(L.protocol);
  if (p.quantity == ProtocolQuantity::ControlRabi) return p.rate(t);
  const double r = p.rate(t);
  if (r == 0.0) return 0.0;
  const double slope = group_velocity_slope(control(l, t), L.coupling_D);
  if (slope <= 0.0) return std::numeric_limits<double>::infinity();
  return r / slope;
}

double MediumProfile::velocity(int l, double t) const {
  const Layer& L = layers.at(l);
  const ModulationProtocol& p = protocols.at(L.protocol);
  if (L.coupling_D == 0.0) return 1.0;
  if (p.quantity == ProtocolQuantity::GroupVelocity) return p.value(t);
  EitParams e;
  e.coupling_D = L.coupling_D;
  e.omega_c_rabi = p.value(t);
  return group_velocity_resonance(e).v;
}

double MediumProfile::velocity_rate(int l, double t) const {
  const Layer& L = layers.at(l);
  const ModulationProtocol& p = protocols.at(L.protocol);
  if (L.coupling_D == 0.0) return 0.0;
  if (p.quantity == ProtocolQuantity::GroupVelocity) return p.rate(t);
  return group_velocity_slope(p.value(t), L.coupling_D) * p.rate(t);
}

double MediumProfile::max_velocity(int l) const {
  const ModulationProtocol& p = protocols.at(layers.at(l).protocol);
  double m = 0.0;
  // Both value maps are monotone, so the extremes sit on segment ends.
  for (const Segment& s : p.segments)
    for (double t : {s.t_start, s.t_end}) m = std::max(m, velocity(l, t));
  return m;
}

double MediumProfile::max_control() const {
  double m = 0.0;
  for (std::size_t l = 0; l < layers.size(); ++l)
    for (const Segment& s : protocols.at(layers[l].protocol).segments)
      for (double t : {s.t_start, s.t_end}) m = std::max(m, control(static_cast<int>(l), t));
  return m;
}

double MediumProfile::max_coupling() const {
  double m = 0.0;
  for (const Layer& L : layers) m = std::max(m, L.coupling_D);
  return m;
}

double MediumProfile::max_control_rate(int l) const {
  const ModulationProtocol& p = protocols.at(layers.at(l).protocol);
  if (p.quantity == ProtocolQuantity::ControlRabi) return p.max_rate();
  // Sample the ramps; the map v -> Omega is nonlinear.
  double m = 0.0;
  for (const Segment& s : p.segments) {
    if (s.shape == RampShape::Hold || s.t_end <= s.t_start) continue;
    for (int i = 0; i < 400; ++i) {
      const double t = s.t_start + (s.t_end - s.t_start) * (i + 0.5) / 400.0;
      m = std::max(m, std::abs(control_rate(l, t)));
    }
  }
  return m;
}

EitParams MediumProfile::params(int l, double t) const {
  const Layer& L = layers.at(l);
  EitParams e;
  e.coupling_D = L.coupling_D;
  e.gamma_e = L.gamma_e;
  e.gamma_m = L.gamma_m;
  e.delta_e = L.delta_e;
  e.delta_R = L.delta_R;
  e.omega_c_rabi = control(l, t);
  return e;
}

}  // namespace eit
