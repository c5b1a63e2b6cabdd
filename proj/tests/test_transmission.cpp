#include "doctest.h"

#include <cmath>
#include <vector>

#include "eitchain/error.hpp"
#include "eitchain/transmission.hpp"

using namespace eit;
using doctest::Approx;

namespace {

MediumProfile slab(double length, double D, double omega_c, double gamma_e) {
  MediumProfile m;
  m.protocols.push_back(ModulationProtocol::constant(ProtocolQuantity::ControlRabi, omega_c));
  m.layers.push_back({0.0, length, D, gamma_e, 0.0, 0.0, 0.0, 0, "slab"});
  return m;
}

}  // namespace

TEST_CASE("EIT slab: transparent at resonance, opaque at the dressed lines") {
  const auto m = slab(100.0, 0.01, 0.07, 1e-3);
  const Grid g = scan_grid(m);
  const std::vector<double> ds{-0.035, 0.0, 0.035};
  const auto pts = transmission_scan(g, m, ds);
  REQUIRE(pts.size() == 3);
  CHECK(pts[1].transmittance == Approx(1.0).epsilon(1e-3));
  CHECK(pts[1].reflectance < 1e-3);
  CHECK(pts[0].transmittance < 0.1);
  CHECK(pts[2].transmittance < 0.1);
  for (const auto& p : pts) CHECK(p.transmittance + p.reflectance <= 1.0 + 2e-3);
}

TEST_CASE("dilute two-level slab follows Beer-Lambert") {
  const auto m = slab(100.0, 1e-4, 0.0, 0.01);
  const Grid g = scan_grid(m);
  const std::vector<double> ds{-0.01, 0.01};
  const auto pts = transmission_scan(g, m, ds);
  // exp(-2 L Im sqrt(1 + chi + 2 Delta)), independent evaluation
  CHECK(pts[0].transmittance == Approx(0.44861135201511393).epsilon(0.02));
  CHECK(pts[1].transmittance == Approx(0.4500491644796055).epsilon(0.02));
  CHECK(pts[0].reflectance < 1e-3);
}

TEST_CASE("scan input checks") {
  const std::vector<double> ds{0.0};
  CHECK_THROWS_AS(scan_grid(MediumProfile{}), ConfigError);
  auto m = slab(100.0, 0.01, 0.07, 1e-3);
  m.protocols[0] = ModulationProtocol::single_ramp(ProtocolQuantity::ControlRabi, 0.07, 0.03, 0.0, 10.0);
  CHECK_THROWS_AS(transmission_scan(scan_grid(m), m, ds), ConfigError);
  m = slab(100.0, 0.01, 0.07, 1e-3);
  Grid tiny = Grid::covering(-50.0, 150.0, 1.0, 0.5);
  CHECK_THROWS_AS(transmission_scan(tiny, m, ds), ConfigError);
}

TEST_CASE("Gaussian window fit") {
  std::vector<TransmissionPoint> pts;
  for (int i = -20; i <= 20; ++i) {
    const double d = 0.002 * i;
    pts.push_back({d, 0.98 * std::exp(-d * d / (2 * 0.02 * 0.02)), 0.0});
  }
  const auto fit = fit_transmission_window(pts);
  CHECK(fit.width == Approx(0.02).epsilon(1e-9));
  CHECK(fit.peak == Approx(0.98).epsilon(1e-9));
  CHECK(fit.points >= 3);

  std::vector<TransmissionPoint> flat{{-0.1, 1.0, 0.0}, {0.0, 1.0, 0.0}, {0.1, 1.0, 0.0}};
  CHECK_THROWS_AS(fit_transmission_window(flat), NonConverged);
}
