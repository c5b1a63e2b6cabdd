#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eitchain/error.hpp"
#include "eitchain/scenarios.hpp"

namespace eit {

struct PeakInfo {
  double x = 0.0;
  double value = 0.0;
};

// Several separated maxima within 10% of the largest one.
class PeakAmbiguous : public Error {
 public:
  PeakAmbiguous(const std::string& what, std::vector<PeakInfo> c) : Error(what), candidates(std::move(c)) {}
  std::vector<PeakInfo> candidates;
};

// Largest sample refined by a parabola through its neighbours (nonuniform x
// allowed).  With strict set, competing local maxima above 0.9 of the peak
// raise PeakAmbiguous.
PeakInfo track_peak(std::span<const double> x, std::span<const double> y, bool strict = false);
std::vector<PeakInfo> local_maxima(std::span<const double> x, std::span<const double> y, double min_prominence);
std::vector<PeakInfo> local_minima(std::span<const double> x, std::span<const double> y, double min_prominence);

// Trapezoid integral, optionally restricted to [a, b).
double integrate(std::span<const double> x, std::span<const double> y);
double integrate(std::span<const double> x, std::span<const double> y, double a, double b);
// Standard deviation of y as a distribution in x; for exp(-u^2) profiles this
// is sigma / sqrt(2).
double second_moment_width(std::span<const double> x, std::span<const double> y);
// Full width at half maximum from interpolated crossings around the peak.
double fwhm(std::span<const double> x, std::span<const double> y);

// x positions and |E|^2 of an MB state.
std::vector<double> grid_positions(const Grid& g);
std::vector<double> intensity(const FieldState& s);

double relative_l2(std::span<const double> a, std::span<const double> b);
double relative_linf(std::span<const double> a, std::span<const double> b);

struct DefectFeatures {
  double hole_width = 0.0;
  double peak_width = 0.0;
  double hole_start = 0.0;
  double peak_start = 0.0;
};

// Features left in the right bulk (x > L_d) after a vacuum-defect cycle.  The
// peak is the tallest structure, measured at half height; the hole lies
// between the steepest falling and the steepest rising edge upstream of it,
// measured at half depth.
DefectFeatures defect_features(std::span<const double> x, std::span<const double> I, double L_d);

struct StorageBalance {
  double incident = 0.0;
  double retrieved = 0.0;
  double reflected = 0.0;
  double front = 0.0;
  double efficiency = 0.0;
};

// Final profile of a storage run split into the backward packet (x < layer),
// the retrieved forward packet and the part that crossed before the stop.
StorageBalance storage_balance(std::span<const double> x, std::span<const double> I, double incident,
                               double layer_end, double t_retrieve, double t_end, double margin = 300.0);

struct Diagnostics {
  std::optional<double> delay;
  std::optional<double> compression;
  std::optional<double> peak_ratio;
  std::optional<double> retrieval_efficiency;
  std::optional<double> hole_width;
  std::optional<double> peak_width;
  std::vector<std::string> notes;
};

// Figure-level observables of a finished run.  The delay needs the
// vacuum-only control run.
Diagnostics measure(const Scenario& sc, const ScenarioRun& run, const ScenarioRun* vacuum_control = nullptr);

// Same scenario with every layer switched off.
// Relative L2 between the final MB intensity and the effective one sampled on the MB grid.
double engine_l2(const ScenarioRun& run);
Scenario vacuum_control(const Scenario& sc);

}  // namespace eit
