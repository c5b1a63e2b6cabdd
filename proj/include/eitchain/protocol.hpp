#pragma once

#include <string>
#include <vector>

namespace eit {

enum class RampShape { Hold, Linear, RaisedCosine };
// Which quantity the schedule prescribes.  The other one follows through the
// resonant group-velocity relation of the layer it drives.
enum class ProtocolQuantity { ControlRabi, GroupVelocity };

struct Segment {
  double t_start = 0.0;
  double t_end = 0.0;
  double start = 0.0;
  double end = 0.0;
  RampShape shape = RampShape::Hold;
};

// Piecewise schedule.  Before the first segment the value is held at the
// first segment's start value, after the last one at the last end value.
class ModulationProtocol {
 public:
  ProtocolQuantity quantity = ProtocolQuantity::ControlRabi;
  std::vector<Segment> segments;
  std::string name;

  static ModulationProtocol constant(ProtocolQuantity q, double value);
  static ModulationProtocol single_ramp(ProtocolQuantity q, double from, double to, double t_start,
                                        double tau, RampShape shape = RampShape::RaisedCosine);
  // from -> to at t_start over tau, hold for t_store, then back to from over tau.
  static ModulationProtocol double_ramp(ProtocolQuantity q, double from, double to, double t_start,
                                        double tau, double t_store,
                                        RampShape shape = RampShape::RaisedCosine);

  void validate() const;
  double value(double t) const;
  double rate(double t) const;
  double max_rate() const;
  double max_value() const;
  double min_value() const;
  // Segment edges, useful as quadrature breakpoints.
  std::vector<double> breakpoints() const;
  bool is_static() const;
};

const char* to_string(RampShape s);
RampShape ramp_shape_from_string(const std::string& s);

}  // namespace eit
