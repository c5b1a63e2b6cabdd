#include "eitchain/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eitchain/error.hpp"

namespace eit {

ModulationProtocol ModulationProtocol::constant(ProtocolQuantity q, double value) {
  ModulationProtocol p;
  p.quantity = q;
  p.segments.push_back({0.0, 0.0, value, value, RampShape::Hold});
  return p;
}

ModulationProtocol ModulationProtocol::single_ramp(ProtocolQuantity q, double from, double to,
                                                   double t_start, double tau, RampShape shape) {
  ModulationProtocol p;
  p.quantity = q;
  p.segments.push_back({t_start, t_start + tau, from, to, shape});
  return p;
}

ModulationProtocol ModulationProtocol::double_ramp(ProtocolQuantity q, double from, double to,
                                                   double t_start, double tau, double t_store,
                                                   RampShape shape) {
  ModulationProtocol p;
  p.quantity = q;
  const double t1 = t_start + tau;
  const double t2 = t1 + t_store;
  p.segments.push_back({t_start, t1, from, to, shape});
  p.segments.push_back({t1, t2, to, to, RampShape::Hold});
  p.segments.push_back({t2, t2 + tau, to, from, shape});
  return p;
}

void ModulationProtocol::validate() const {
  if (segments.empty()) throw ConfigError("protocol '" + name + "' has no segments");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    if (!(s.t_end >= s.t_start)) throw ConfigError("protocol '" + name + "': segment ends before it starts");
    if (s.start < 0.0 || s.end < 0.0) throw ConfigError("protocol '" + name + "': negative value");
    if (s.shape == RampShape::Hold && s.start != s.end)
      throw ConfigError("protocol '" + name + "': hold segment with different end values");
    if (i > 0) {
      const Segment& prev = segments[i - 1];
      const double scale = std::max({1.0, std::abs(prev.t_end), std::abs(s.t_start)});
      if (std::abs(prev.t_end - s.t_start) > 1e-12 * scale)
        throw ConfigError("protocol '" + name + "': segments are not contiguous");
      const double vs = std::max({1e-300, std::abs(prev.end), std::abs(s.start)});
      if (std::abs(prev.end - s.start) > 1e-12 * vs)
        throw ConfigError("protocol '" + name + "': value jumps between segments");
    }
  }
}

namespace {

double shape_value(const Segment& s, double t) {
  const double span = s.t_end - s.t_start;
  if (span <= 0.0 || s.shape == RampShape::Hold) return s.end;
  const double u = std::clamp((t - s.t_start) / span, 0.0, 1.0);
  const double w = s.shape == RampShape::Linear ? u : 0.5 * (1.0 - std::cos(std::numbers::pi * u));
  return s.start + (s.end - s.start) * w;
}

double shape_rate(const Segment& s, double t) {
  const double span = s.t_end - s.t_start;
  if (span <= 0.0 || s.shape == RampShape::Hold) return 0.0;
  if (t < s.t_start || t > s.t_end) return 0.0;
  const double d = (s.end - s.start) / span;
  if (s.shape == RampShape::Linear) return d;
  const double u = (t - s.t_start) / span;
  return d * 0.5 * std::numbers::pi * std::sin(std::numbers::pi * u);
}

}  // namespace

double ModulationProtocol::value(double t) const {
  if (segments.empty()) return 0.0;
  if (t <= segments.front().t_start) return segments.front().start;
  for (const Segment& s : segments)
    if (t <= s.t_end) return shape_value(s, t);
  return segments.back().end;
}

double ModulationProtocol::rate(double t) const {
  for (const Segment& s : segments)
    if (t >= s.t_start && t < s.t_end) return shape_rate(s, t);
  return 0.0;
}

double ModulationProtocol::max_rate() const {
  double m = 0.0;
  for (const Segment& s : segments) {
    const double span = s.t_end - s.t_start;
    if (span <= 0.0 || s.shape == RampShape::Hold) continue;
    double r = std::abs(s.end - s.start) / span;
    if (s.shape == RampShape::RaisedCosine) r *= 0.5 * std::numbers::pi;
    m = std::max(m, r);
  }
  return m;
}

double ModulationProtocol::max_value() const {
  double m = 0.0;
  for (const Segment& s : segments) m = std::max({m, s.start, s.end});
  return m;
}

double ModulationProtocol::min_value() const {
  if (segments.empty()) return 0.0;
  double m = segments.front().start;
  for (const Segment& s : segments) m = std::min({m, s.start, s.end});
  return m;
}

std::vector<double> ModulationProtocol::breakpoints() const {
  std::vector<double> b;
  for (const Segment& s : segments) {
    b.push_back(s.t_start);
    b.push_back(s.t_end);
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

bool ModulationProtocol::is_static() const {
  for (const Segment& s : segments)
    if (s.start != s.end) return false;
  return true;
}

const char* to_string(RampShape s) {
  switch (s) {
    case RampShape::Hold: return "hold";
    case RampShape::Linear: return "linear";
    case RampShape::RaisedCosine: return "raised_cosine";
  }
  return "?";
}

RampShape ramp_shape_from_string(const std::string& s) {
  if (s == "hold") return RampShape::Hold;
  if (s == "linear") return RampShape::Linear;
  if (s == "raised_cosine") return RampShape::RaisedCosine;
  throw ConfigError("unknown ramp shape '" + s + "'");
}

}  // namespace eit
