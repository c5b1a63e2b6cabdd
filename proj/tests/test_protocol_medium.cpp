#include "doctest.h"

#include <cmath>
#include <numbers>
#include <string>

#include "eitchain/error.hpp"
#include "eitchain/medium.hpp"
#include "eitchain/protocol.hpp"

using namespace eit;
using doctest::Approx;

TEST_CASE("single raised-cosine ramp") {
  auto p = ModulationProtocol::single_ramp(ProtocolQuantity::GroupVelocity, 0.11, 0.055, 300.0, 100.0);
  p.validate();
  CHECK(p.value(0.0) == Approx(0.11));
  CHECK(p.value(300.0) == Approx(0.11));
  CHECK(p.value(350.0) == Approx(0.0825));
  CHECK(p.value(400.0) == Approx(0.055));
  CHECK(p.value(1e6) == Approx(0.055));
  CHECK(p.rate(250.0) == 0.0);
  CHECK(p.rate(350.0) == Approx(-0.055 / 100.0 * 0.5 * std::numbers::pi));
  CHECK(p.max_rate() == Approx(0.055 / 100.0 * 0.5 * std::numbers::pi));
  CHECK(p.max_value() == Approx(0.11));
  CHECK(p.min_value() == Approx(0.055));
  CHECK_FALSE(p.is_static());

  const double h = 1e-4;
  for (double t : {310.0, 333.0, 377.0, 395.0})
    CHECK(p.rate(t) == Approx((p.value(t + h) - p.value(t - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("double ramp and breakpoints") {
  auto p = ModulationProtocol::double_ramp(ProtocolQuantity::ControlRabi, 0.07, 0.0, 2160.0, 100.0, 1350.0);
  p.validate();
  REQUIRE(p.segments.size() == 3);
  CHECK(p.value(2300.0) == 0.0);
  CHECK(p.value(3000.0) == 0.0);
  CHECK(p.value(4000.0) == Approx(0.07));
  const auto b = p.breakpoints();
  REQUIRE(b.size() == 4);
  CHECK(b[0] == 2160.0);
  CHECK(b[1] == 2260.0);
  CHECK(b[2] == 3610.0);
  CHECK(b[3] == 3710.0);

  auto lin = ModulationProtocol::single_ramp(ProtocolQuantity::ControlRabi, 1.0, 0.0, 0.0, 10.0, RampShape::Linear);
  CHECK(lin.value(2.5) == Approx(0.75));
  CHECK(lin.rate(5.0) == Approx(-0.1));
}

TEST_CASE("protocol validation") {
  ModulationProtocol p;
  p.name = "bad";
  CHECK_THROWS_AS(p.validate(), ConfigError);

  p.segments = {{0.0, 10.0, 1.0, 2.0, RampShape::Linear}, {11.0, 20.0, 2.0, 2.0, RampShape::Hold}};
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("contiguous"), ConfigError);

  p.segments = {{0.0, 10.0, 1.0, 2.0, RampShape::Linear}, {10.0, 20.0, 3.0, 3.0, RampShape::Hold}};
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("jumps"), ConfigError);

  p.segments = {{0.0, 10.0, 1.0, 2.0, RampShape::Hold}};
  CHECK_THROWS_AS(p.validate(), ConfigError);

  p.segments = {{0.0, 10.0, -1.0, 2.0, RampShape::Linear}};
  CHECK_THROWS_AS(p.validate(), ConfigError);

  CHECK(ModulationProtocol::constant(ProtocolQuantity::ControlRabi, 0.07).is_static());
  CHECK(ramp_shape_from_string(to_string(RampShape::RaisedCosine)) == RampShape::RaisedCosine);
  CHECK_THROWS_AS(ramp_shape_from_string("step"), ConfigError);
}

TEST_CASE("medium profile") {
  MediumProfile m;
  m.protocols.push_back(ModulationProtocol::constant(ProtocolQuantity::GroupVelocity, 0.11));
  m.protocols.push_back(ModulationProtocol::constant(ProtocolQuantity::ControlRabi, 0.07));
  m.layers.push_back({0.0, 100.0, 0.01, 1e-3, 0.0, 0.0, 0.0, 0, "first"});
  m.layers.push_back({200.0, 300.0, 0.01, 1e-3, 0.0, 0.0, 0.0, 1, "second"});
  m.validate();

  CHECK(m.layer_at(-1.0) == -1);
  CHECK(m.layer_at(0.0) == 0);
  CHECK(m.layer_at(150.0) == -1);
  CHECK(m.layer_at(250.0) == 1);
  CHECK(m.occupation(0, 50.0) == 1.0);
  CHECK(m.occupation(0, 100.0) == 0.0);

  CHECK(m.velocity(0, 5.0) == Approx(0.11));
  CHECK(m.velocity(1, 5.0) == Approx(0.10913140311804011));
  CHECK(m.control(1, 5.0) == Approx(0.07));
  // Rabi frequency for v = 0.11 closes the loop through the velocity formula
  const double om = m.control(0, 0.0);
  CHECK(om == Approx(2.0 * std::sqrt(0.01 * 0.11 / 0.89)));
  CHECK(m.max_coupling() == Approx(0.01));
  CHECK(m.max_velocity(0) == Approx(0.11));
  CHECK(m.params(1, 0.0).omega_c_rabi == Approx(0.07));
  CHECK(m.params(1, 0.0).gamma_e == Approx(1e-3));

  SUBCASE("a layer without atoms transmits at c") {
    m.layers[0].coupling_D = 0.0;
    CHECK(m.velocity(0, 0.0) == 1.0);
    CHECK(m.velocity_rate(0, 0.0) == 0.0);
  }

  SUBCASE("smoothed interfaces") {
    m.interface_smoothing = 10.0;
    CHECK(m.occupation(0, 0.0) == Approx(0.5));
    CHECK(m.occupation(0, -5.0) == Approx(0.0));
    CHECK(m.occupation(0, 5.0) == Approx(1.0));
    CHECK(m.occupation(0, 100.0) == Approx(0.5));
  }

  SUBCASE("overlap names both layers") {
    m.layers[1].x_start = 50.0;
    try {
      m.validate();
      FAIL("overlap not detected");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("'first'") != std::string::npos);
      CHECK(msg.find("'second'") != std::string::npos);
    }
  }

  SUBCASE("unordered layers") {
    std::swap(m.layers[0], m.layers[1]);
    CHECK_THROWS_WITH_AS(m.validate(), doctest::Contains("ordered"), ConfigError);
  }

  SUBCASE("missing protocol and superluminal drive") {
    m.layers[0].protocol = 5;
    CHECK_THROWS_WITH_AS(m.validate(), doctest::Contains("missing protocol"), ConfigError);
    m.layers[0].protocol = 0;
    m.protocols[0] = ModulationProtocol::constant(ProtocolQuantity::GroupVelocity, 1.5);
    CHECK_THROWS_WITH_AS(m.validate(), doctest::Contains("light speed"), ConfigError);
  }

  SUBCASE("ramp rates in both parametrisations") {
    m.protocols[0] = ModulationProtocol::single_ramp(ProtocolQuantity::GroupVelocity, 0.11, 0.055, 0.0, 100.0);
    const double h = 1e-3;
    for (double t : {20.0, 50.0, 80.0}) {
      CHECK(m.control_rate(0, t) == Approx((m.control(0, t + h) - m.control(0, t - h)) / (2 * h)).epsilon(1e-5));
      CHECK(m.velocity_rate(0, t) == Approx((m.velocity(0, t + h) - m.velocity(0, t - h)) / (2 * h)).epsilon(1e-5));
    }
    CHECK(m.max_control_rate(0) >= std::abs(m.control_rate(0, 50.0)) * (1 - 1e-6));
  }
}
