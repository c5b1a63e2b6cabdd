#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "eitchain/cli.hpp"
#include "eitchain/error.hpp"
#include "eitchain/io.hpp"
#include "eitchain/scenarios.hpp"

using namespace eit;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = 0;
  std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "eitchain");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  auto* ob = std::cout.rdbuf(out.rdbuf());
  auto* eb = std::cerr.rdbuf(err.rdbuf());
  CliResult r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(ob);
  std::cerr.rdbuf(eb);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("eitchain_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST_CASE("tables round trip in both formats") {
  const fs::path dir = scratch("tables");
  Table t;
  t.columns = {"x", "I"};
  t.add_row({-1.5, 0.25});
  t.add_row({2.0, 1e-300});
  t.add_row({3.0, 0.1 + 0.2});
  CHECK(t.rows() == 3);
  CHECK_THROWS_AS(t.add_row({1.0}), ConfigError);
  const json h = {{"scenario", "unit"}, {"t", 12.5}};

  for (OutputFormat f : {OutputFormat::Text, OutputFormat::Binary}) {
    const fs::path p = dir / (f == OutputFormat::Text ? "t.txt" : "t.bin");
    write_table(p, h, t, f);
    json back_h;
    const Table back = read_table(p, &back_h);
    CHECK(back.columns == t.columns);
    REQUIRE(back.data.size() == t.data.size());
    for (std::size_t i = 0; i < t.data.size(); ++i) CHECK(back.data[i] == t.data[i]);
    CHECK(back_h.at("scenario") == "unit");
    CHECK(back_h.at("t").get<double>() == 12.5);
  }

  std::ifstream bin(dir / "t.bin", std::ios::binary);
  char magic[8];
  bin.read(magic, 8);
  CHECK(std::string(magic, 8) == "EITCHAIN");

  write_file(dir / "broken.bin", std::string("EITCHAIN") + std::string(4, '\x07'));
  CHECK_THROWS_AS(read_table(dir / "broken.bin"), ConfigError);
  CHECK_THROWS_AS(read_table(dir / "missing.txt"), ConfigError);
  CHECK(format_from_string("binary") == OutputFormat::Binary);
  CHECK_THROWS_AS(format_from_string("hdf5"), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("scenario JSON round trip") {
  for (const auto& n : preset_names()) {
    CAPTURE(n);
    const Scenario sc = preset(n);
    const json j = to_json(sc);
    const Scenario back = scenario_from_json(j);
    CHECK(to_json(back) == j);
  }
}

TEST_CASE("scenario JSON overrides and strictness") {
  const Scenario sc = scenario_from_json(json::parse(R"({"preset": "static_interface", "t_end": 123.0,
      "pulse": {"sigma": 300.0}})"));
  CHECK(sc.t_end == 123.0);
  CHECK(sc.pulse.sigma == 300.0);
  CHECK(sc.pulse.center_x0 == Approx(-2000.0));
  CHECK_THROWS_WITH_AS(scenario_from_json(json::parse(R"({"pulse": {"sigmaa": 3}})")), doctest::Contains("sigmaa"),
                       ConfigError);
  CHECK_THROWS_AS(scenario_from_json(json::parse(R"({"preset": "nope"})")), UnknownPreset);
  CHECK_THROWS_AS(scenario_from_json(json::parse(R"({"t_end": "soon"})")), ConfigError);

  const json seg = json::parse(R"({"medium": {"protocols": [{"quantity": "control_rabi",
      "segments": [{"value": 0.07}]}]}})");
  const Scenario s2 = scenario_from_json(seg);
  CHECK(s2.medium.protocols.at(0).value(5.0) == Approx(0.07));

  const fs::path dir = scratch("load");
  write_file(dir / "c.json", "// comment\n{\"preset\": \"homogeneous_ramp\", \"name\": \"mine\"}\n");
  CHECK(load_scenario(dir / "c.json").name == "mine");
  CHECK_THROWS_AS(load_scenario(dir / "none.json"), ConfigError);
  write_file(dir / "bad.json", "{\"preset\": ");
  CHECK_THROWS_AS(load_scenario(dir / "bad.json"), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("cli: validate reports overlapping layers by name") {
  const fs::path dir = scratch("overlap");
  write_file(dir / "overlap.json", R"({
    "preset": "static_interface",
    "medium": {"layers": [
      {"name": "front", "x_start": 0, "x_end": 300, "coupling_D": 0.01, "gamma_e": 0.001},
      {"name": "back", "x_start": 200, "x_end": 500, "coupling_D": 0.01, "gamma_e": 0.001}]}
  })");
  const CliResult r = cli({"validate", (dir / "overlap.json").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("'front'") != std::string::npos);
  CHECK(r.err.find("'back'") != std::string::npos);

  const CliResult ok = cli({"validate", "static_interface"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("ok") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli: configuration errors exit with 1") {
  CHECK(cli({"run", "no_such_preset"}).code == 1);
  CHECK(cli({"run", "static_interface", "--engine", "fdtd"}).code == 1);
  CHECK(cli({}).code == 1);
  CHECK(cli({"--help"}).code == 0);
  const CliResult r = cli({"run", "static_interface", "--dt", "5", "--engine", "effective", "--out",
                           (fs::temp_directory_path() / "eitchain_io_cfl").string()});
  CHECK(r.code == 1);
  fs::remove_all(fs::temp_directory_path() / "eitchain_io_cfl");
}

TEST_CASE("cli: numerical failure exits with 2 and points at the snapshot") {
  const fs::path dir = scratch("blowup");
  write_file(dir / "huge.json", R"({"preset": "static_interface", "engine": "mb", "pulse": {"amplitude": 1e308}})");
  const CliResult r = cli({"run", (dir / "huge.json").string(), "--out", (dir / "out").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("diagnostic snapshot") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "mb_failure_snapshot.txt"));
  fs::remove_all(dir);
}

TEST_CASE("cli: bands and presets") {
  const CliResult b = cli({"bands", "--n", "5", "--k-min", "0.9", "--k-max", "1.1"});
  CHECK(b.code == 0);
  std::istringstream is(b.out);
  std::string line;
  int rows = 0;
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#') ++rows;
  CHECK(rows == 5);

  const CliResult p = cli({"presets"});
  CHECK(p.code == 0);
  for (const auto& n : preset_names()) CHECK(p.out.find(n) != std::string::npos);
}

TEST_CASE("cli: a short effective run writes snapshots and a summary") {
  const fs::path dir = scratch("run");
  const CliResult r = cli({"run", "homogeneous_ramp", "--engine", "effective", "--snapshots", "3", "--format",
                           "binary", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "config.json"));
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "effective_diagnostics.txt"));
  json h;
  const Table t = read_table(dir / "effective_snapshot_2.bin", &h);
  CHECK(t.columns.at(0) == "x");
  CHECK(t.rows() > 100);
  CHECK(h.at("t").get<double>() == Approx(preset("homogeneous_ramp").t_end));
  json s;
  std::ifstream(dir / "summary.json") >> s;
  CHECK(s.at("effective").at("peak_ratio").get<double>() == Approx(0.5).epsilon(0.03));
  fs::remove_all(dir);
}
