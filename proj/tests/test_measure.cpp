#include "doctest.h"

#include <cmath>
#include <vector>

#include "eitchain/effective_flow.hpp"
#include "eitchain/measure.hpp"

using namespace eit;
using doctest::Approx;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

std::vector<double> gaussian(const std::vector<double>& x, double x0, double s, double a = 1.0) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * std::exp(-std::pow((x[i] - x0) / s, 2));
  return y;
}

}  // namespace

TEST_CASE("widths and integrals of a Gaussian") {
  const auto x = linspace(-500.0, 500.0, 4001);
  const auto y = gaussian(x, 12.0, 40.0);
  CHECK(integrate(x, y) == Approx(40.0 * std::sqrt(M_PI)).epsilon(1e-9));
  CHECK(integrate(x, y, 12.0, 1e9) == Approx(20.0 * std::sqrt(M_PI)).epsilon(1e-6));
  CHECK(second_moment_width(x, y) == Approx(40.0 / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(fwhm(x, y) == Approx(2.0 * 40.0 * std::sqrt(std::log(2.0))).epsilon(1e-4));
  const PeakInfo p = track_peak(x, y, true);
  CHECK(p.x == Approx(12.0).epsilon(1e-4));
  CHECK(p.value == Approx(1.0).epsilon(1e-5));
  std::vector<double> bad(3);
  CHECK_THROWS_AS(integrate(x, bad), ConfigError);
}

TEST_CASE("peak tracking on a nonuniform grid") {
  std::vector<double> x;
  for (double v = -100.0; v < 0.0; v += 1.0) x.push_back(v);
  for (double v = 0.0; v <= 100.0; v += 0.11) x.push_back(v);
  const auto y = gaussian(x, 0.3, 10.0);
  CHECK(track_peak(x, y).x == Approx(0.3).epsilon(1e-3));
}

TEST_CASE("competing maxima are reported") {
  const auto x = linspace(0.0, 1000.0, 2001);
  auto y = gaussian(x, 300.0, 30.0);
  const auto y2 = gaussian(x, 700.0, 30.0, 0.95);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += y2[i];
  CHECK_NOTHROW(track_peak(x, y, false));
  try {
    track_peak(x, y, true);
    FAIL("expected PeakAmbiguous");
  } catch (const PeakAmbiguous& e) {
    REQUIRE(e.candidates.size() == 2);
    CHECK(e.candidates[0].x == Approx(300.0).epsilon(1e-3));
    CHECK(e.candidates[1].x == Approx(700.0).epsilon(1e-3));
  }
  const auto mx = local_maxima(x, y, 0.1);
  const auto mn = local_minima(x, y, 0.1);
  CHECK(mx.size() == 2);
  REQUIRE(mn.size() == 1);
  CHECK(mn[0].x == Approx(500.0).epsilon(0.01));
  // a 2% ripple is filtered by the prominence threshold
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += 0.005 * std::sin(x[i] * 0.5);
  CHECK(local_maxima(x, y, 0.05).size() == 2);
}

TEST_CASE("relative norms") {
  const std::vector<double> a{1.0, 2.0, 3.0}, b{1.0, 2.0, 4.0};
  CHECK(relative_l2(a, b) == Approx(1.0 / std::sqrt(21.0)));
  CHECK(relative_linf(a, b) == Approx(0.25));
  CHECK(relative_l2(a, a) == 0.0);
  const std::vector<double> c{1.0};
  CHECK_THROWS_AS(relative_l2(a, c), ConfigError);
}

TEST_CASE("hole and peak left by a vacuum-defect cycle") {
  // Double ramp 0.11 -> 0.02 -> 0.11 of both bulks around a 6400-long defect.
  const double vp = 0.11, vm = 0.02, Ld = 6400.0, sb = 1600.0, tau = 100.0, ts = 60000.0, x0 = -6400.0;
  const double t1 = (-x0 + 0.5 * Ld * vp) / vp;
  const double tf = t1 + tau + ts + tau + Ld + 300.0;
  auto p = ModulationProtocol::double_ramp(ProtocolQuantity::GroupVelocity, vp, vm, t1, tau, ts);
  AnalyticDefect a([&](double x) { return std::exp(-std::pow((x - x0) / sb, 2)); },
                   DefectGeometry::from_protocol(Ld, p));
  std::vector<double> x, I;
  for (double v = Ld - 400.0; v < Ld + 3000.0; v += 0.25) {
    x.push_back(v);
    I.push_back(a(v, tf));
  }
  const DefectFeatures f = defect_features(x, I, Ld);
  // independent evaluation of the same closed form on a 0.05 grid
  CHECK(f.hole_width == Approx(704.1522010462768).epsilon(1e-3));
  CHECK(f.peak_width == Approx(127.88180329510033).epsilon(1e-3));
  CHECK(f.hole_start - Ld == Approx(38.52266812733251).epsilon(0.01));
  CHECK(f.peak_start - Ld == Approx(1816.397791755413).epsilon(1e-3));

  const std::vector<double> shortx{0.0, 1.0}, shorty{0.0, 1.0};
  CHECK_THROWS_AS(defect_features(shortx, shorty, 5.0), ConfigError);
}

TEST_CASE("storage balance") {
  const auto x = linspace(-3000.0, 5000.0, 8001);
  auto I = gaussian(x, -1000.0, 100.0, 0.1);
  const auto fwd = gaussian(x, 1500.0, 100.0, 0.2);
  const auto lead = gaussian(x, 4000.0, 100.0, 0.3);
  for (std::size_t i = 0; i < I.size(); ++i) I[i] += fwd[i] + lead[i];
  const double incident = std::sqrt(M_PI) * 100.0;
  const StorageBalance b = storage_balance(x, I, incident, 10.0, 1000.0, 2500.0, 300.0);
  CHECK(b.reflected / incident == Approx(0.1).epsilon(1e-6));
  CHECK(b.efficiency == Approx(0.2).epsilon(1e-6));
  CHECK(b.front / incident == Approx(0.3).epsilon(1e-6));
  CHECK_THROWS_AS(storage_balance(x, I, 0.0, 10.0, 1000.0, 2500.0), ConfigError);
}
