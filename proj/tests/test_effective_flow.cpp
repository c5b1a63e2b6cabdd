#include "doctest.h"

#include <cmath>
#include <vector>

#include "eitchain/effective_flow.hpp"
#include "eitchain/error.hpp"
#include "eitchain/scenarios.hpp"

using namespace eit;
using doctest::Approx;

namespace {

MediumProfile layer_with(double x0, double x1, ModulationProtocol p, double gamma_e = 0.0) {
  MediumProfile m;
  m.protocols.push_back(std::move(p));
  m.layers.push_back({x0, x1, 0.01, gamma_e, 0.0, 0.0, 0.0, 0, "bulk"});
  return m;
}

double gauss(double x, double x0, double s) {
  const double u = (x - x0) / s;
  return std::exp(-u * u);
}

struct Moments {
  double mass = 0.0, mean = 0.0, var = 0.0;
};

Moments moments(const EffectiveSolver& s, const IntensityState& st) {
  Moments m;
  const auto& mesh = s.mesh();
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    m.mass += st.I[i] * mesh.widths[i];
    m.mean += st.I[i] * mesh.widths[i] * mesh.centers[i];
  }
  m.mean /= m.mass;
  for (std::size_t i = 0; i < mesh.size(); ++i)
    m.var += st.I[i] * mesh.widths[i] * (mesh.centers[i] - m.mean) * (mesh.centers[i] - m.mean);
  m.var /= m.mass;
  return m;
}

}  // namespace

TEST_CASE("mesh follows the local light speed") {
  const auto m = layer_with(0.0, 110.0, ModulationProtocol::constant(ProtocolQuantity::GroupVelocity, 0.11));
  EffectiveOptions o;
  o.x_min = -100.0;
  o.x_max = 200.0;
  EffectiveSolver s(m, o);
  const auto& mesh = s.mesh();
  CHECK(mesh.size() == 100 + 1000 + 90);
  CHECK(mesh.widths[0] == Approx(1.0));
  CHECK(mesh.widths[150] == Approx(0.11));
  CHECK(mesh.layer[150] == 0);
  CHECK(mesh.layer[0] == -1);
  CHECK(mesh.index_of(0.05) == 100);
  CHECK(mesh.index_of(-1e9) == 0);
  CHECK(s.dt() == 1.0);

  o.dt = 2.0;
  EffectiveSolver bad(m, o);
  IntensityState st = bad.init_gaussian(-50.0, 5.0);
  CHECK_THROWS_AS(bad.step(st), CflViolation);

  o.x_max = o.x_min;
  CHECK_THROWS_AS(EffectiveSolver(m, o), ConfigError);
}

TEST_CASE("vacuum translation is exact at unit Courant number") {
  EffectiveOptions o;
  o.x_min = 0.0;
  o.x_max = 1000.0;
  EffectiveSolver s(MediumProfile{}, o);
  IntensityState st = s.init_gaussian(200.0, 30.0);
  const IntensityState ref = s.init_gaussian(500.0, 30.0);
  for (int i = 0; i < 300; ++i) s.step(st);
  double err = 0.0;
  for (std::size_t i = 0; i < st.I.size(); ++i) err = std::max(err, std::abs(st.I[i] - ref.I[i]));
  CHECK(err < 1e-12);
}

TEST_CASE("first-order upwinding converges at first order") {
  auto error_at = [](double dx) {
    EffectiveOptions o;
    o.x_min = 0.0;
    o.x_max = 1000.0;
    o.dx_vacuum = dx;
    o.dt = 0.5 * dx;
    o.muscl = false;
    EffectiveSolver s(MediumProfile{}, o);
    IntensityState st = s.init_gaussian(300.0, 40.0);
    const IntensityState ref = s.init_gaussian(500.0, 40.0);
    const int n = static_cast<int>(std::lround(200.0 / o.dt));
    for (int i = 0; i < n; ++i) s.step(st);
    double e = 0.0, r = 0.0;
    for (std::size_t i = 0; i < st.I.size(); ++i) {
      e += std::pow(st.I[i] - ref.I[i], 2) * dx;
      r += std::pow(ref.I[i], 2) * dx;
    }
    return std::sqrt(e / r);
  };
  const double e1 = error_at(1.0), e2 = error_at(0.5), e3 = error_at(0.25);
  const double order = std::log2(e2 / e3);
  CHECK(order == Approx(1.0).epsilon(0.15));
  CHECK(e1 > e2);
}

TEST_CASE("polariton content is conserved across a static slow layer") {
  const auto m = layer_with(0.0, 440.0, ModulationProtocol::constant(ProtocolQuantity::GroupVelocity, 0.11));
  EffectiveOptions o;
  o.x_min = -500.0;
  o.x_max = 3000.0;
  EffectiveSolver s(m, o);
  IntensityState st = s.init_gaussian(-250.0, 40.0);
  const double c0 = s.polariton_content(st);
  const std::vector<double> times{1000.0, 4000.0};
  const EffectiveRun r = s.run(st, 4500.0, times, 10);
  for (const auto& d : r.diagnostics) CHECK(d.content == Approx(c0).epsilon(1e-12));
  // After the layer the pulse is back in vacuum, delayed by L (1/v - 1).
  const auto d = s.diagnose(r.snapshots.back());
  CHECK(d.x_peak == Approx(-250.0 + 4500.0 - 440.0 * (1.0 / 0.11 - 1.0)).epsilon(0.01));
  CHECK(d.peak == Approx(1.0).epsilon(0.02));
}

TEST_CASE("a homogeneous ramp rescales the intensity by the velocity ratio") {
  const auto m = layer_with(-4000.0, 4000.0,
                            ModulationProtocol::single_ramp(ProtocolQuantity::GroupVelocity, 0.11, 0.055, 300.0, 100.0));
  EffectiveOptions o;
  o.x_min = -4000.0;
  o.x_max = 4000.0;
  EffectiveSolver s(m, o);
  IntensityState st = s.init_gaussian(-300.0, 44.0);
  const double i0 = s.diagnose(st).integral;
  const double c0 = s.polariton_content(st);
  const std::vector<double> none;
  const EffectiveRun r = s.run(st, 1500.0, none, 10);
  const auto d = r.diagnostics.back();
  CHECK(d.integral / i0 == Approx(0.5).epsilon(1e-10));
  CHECK(d.content == Approx(c0).epsilon(1e-10));
  CHECK(d.peak == Approx(0.5).epsilon(0.03));
}

TEST_CASE("diffusion widens a pulse by 2 D t") {
  const auto m = layer_with(-2000.0, 2000.0, ModulationProtocol::constant(ProtocolQuantity::GroupVelocity, 0.11), 0.01);
  EffectiveOptions o;
  o.x_min = -2000.0;
  o.x_max = 2000.0;
  o.dx_vacuum = 10.0;
  EffectiveSolver s(m, o);
  IntensityState st = s.init_gaussian(-1000.0, 50.0);
  const Moments m0 = moments(s, st);
  for (int i = 0; i < 500; ++i) s.step(st);
  const Moments m1 = moments(s, st);
  const double D = 0.11 * 0.01 / 0.01;
  CHECK(m1.mass == Approx(m0.mass).epsilon(1e-12));
  CHECK(m1.mean - m0.mean == Approx(0.11 * 5000.0).epsilon(1e-6));
  CHECK(m1.var - m0.var == Approx(2.0 * D * 5000.0).epsilon(0.02));
  CHECK(s.diffusivity(s.mesh().index_of(0.0), 0.0) == Approx(D));
}

TEST_CASE("inflow boundary feeds a translating pulse") {
  EffectiveOptions o;
  o.x_min = 0.0;
  o.x_max = 2000.0;
  EffectiveSolver s(MediumProfile{}, o);
  const double x0 = -300.0, sg = 40.0;
  s.inflow = [&](double t) { return gauss(0.0, x0 + t, sg); };
  IntensityState st = s.init([](double) { return 0.0; });
  for (int i = 0; i < 1000; ++i) s.step(st);
  const IntensityState ref = s.init([&](double x) { return gauss(x, x0 + 1000.0, sg); });
  double err = 0.0;
  for (std::size_t i = 0; i < st.I.size(); ++i) err = std::max(err, std::abs(st.I[i] - ref.I[i]));
  CHECK(err < 2e-3);
}

TEST_CASE("failure paths") {
  const auto m = layer_with(0.0, 100.0, ModulationProtocol::single_ramp(ProtocolQuantity::GroupVelocity, 0.11, 0.0, 10.0, 10.0));
  EffectiveOptions o;
  o.x_min = -100.0;
  o.x_max = 200.0;
  EffectiveSolver s(m, o);
  IntensityState st = s.init_gaussian(-50.0, 5.0);
  const std::vector<double> none;
  CHECK_THROWS_AS(s.run(st, 40.0, none), ConfigError);
  CHECK_THROWS_AS(s.run(st, 0.0, none), ConfigError);
  st.I[3] = -1.0;
  CHECK_THROWS_AS(s.step(st), NegativeIntensity);
}

TEST_CASE("analytic defect solution") {
  const double v = 0.11, L = 500.0, x0 = -2000.0, sg = 300.0;
  auto I0 = [&](double x) { return gauss(x, x0, sg); };

  SUBCASE("static bulk reduces to translation with a vacuum gap") {
    DefectGeometry g = DefectGeometry::from_protocol(L, ModulationProtocol::constant(ProtocolQuantity::GroupVelocity, v));
    AnalyticDefect a(I0, g);
    const double t = 20000.0;
    CHECK(a(-100.0, t) == Approx(I0(-100.0 - v * t)).epsilon(1e-9));
    CHECK(a(200.0, t) == Approx(I0(-v * (t - 200.0))).epsilon(1e-9));
    CHECK(a(900.0, t) == Approx(I0(-v * t + (900.0 - L) + v * L)).epsilon(1e-6));
    CHECK(a.travel(0.0, 100.0) == Approx(11.0).epsilon(1e-12));
    // continuity at both defect edges
    CHECK(a(-1e-9, t) == Approx(a(1e-9, t)).epsilon(1e-6));
    CHECK(a(L - 1e-9, t) == Approx(a(L + 1e-7, t)).epsilon(1e-5));
    CHECK(analytic_defect(I0, g, -100.0, t) == Approx(a(-100.0, t)));
  }

  SUBCASE("a modulated bulk leaves a hole ahead of the released peak") {
    auto p = ModulationProtocol::double_ramp(ProtocolQuantity::GroupVelocity, v, 0.02, 15000.0, 100.0, 20000.0);
    DefectGeometry g = DefectGeometry::from_protocol(L, p);
    AnalyticDefect a(I0, g);
    const double t = 40000.0;
    const double P = a.travel(0.0, t);
    // beyond L + P(t) only unperturbed bulk light is found
    CHECK(a(L + P + 10.0, t) == Approx(I0(L + P + 10.0 - P)).epsilon(1e-9));
    // between the re-entered tail and the front there is no light
    const double front = L + P - a.travel(0.0, L);
    if (front < L + P) CHECK(a(0.5 * (front + L + P), t) == 0.0);
  }

  SUBCASE("geometry checks") {
    DefectGeometry g;
    g.L_d = L;
    CHECK_THROWS_AS(AnalyticDefect(I0, g), ConfigError);
    DefectGeometry c = DefectGeometry::from_protocol(L, ModulationProtocol::constant(ProtocolQuantity::ControlRabi, 0.07), 0.01);
    CHECK(c.v(0.0) == Approx(0.10913140311804011));
  }
}

TEST_CASE("slice estimates") {
  CHECK(slice_modulation_estimate(1.0, 0.1, -0.05) == Approx(0.5));
  CHECK(slice_modulation_estimate(2.0, 0.1, 0.08) == Approx(3.6));
  CHECK(linear_ramp_slice_change(-0.05, 0.1, 10.0, 20.0) == Approx(-0.25));
}

TEST_CASE("absorption length") {
  const PhysicalUnits u = PhysicalUnits::sodium();
  EitParams p;
  p.coupling_D = 3e-9;
  p.gamma_e = u.from_hz(10e6);

  p.omega_c_rabi = control_for_group_velocity(1e-7, p.coupling_D);
  CHECK(absorption_length_ratio(p, u.from_us(10.0)) == Approx(486.3).epsilon(0.002));

  p.omega_c_rabi = control_for_group_velocity(5e-7, p.coupling_D);
  const double r = absorption_length_ratio(p, u.from_us(1.0));
  CHECK(r == Approx(243.2).epsilon(0.002));
  CHECK(absorption_length(p, u.from_us(1.0)) == Approx(r * 5e-7 * u.from_us(1.0)).epsilon(1e-9));

  p.gamma_e = 1e300;
  CHECK(absorption_length_ratio(p, u.from_us(1.0)) == Approx(0.0).scale(1.0));
}
