#include "eitchain/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "eitchain/error.hpp"

namespace eit {

static_assert(std::endian::native == std::endian::little, "binary output assumes a little-endian host");

namespace {

const char* quantity_name(ProtocolQuantity q) {
  return q == ProtocolQuantity::ControlRabi ? "control_rabi" : "group_velocity";
}

ProtocolQuantity quantity_from_string(const std::string& s) {
  if (s == "control_rabi") return ProtocolQuantity::ControlRabi;
  if (s == "group_velocity") return ProtocolQuantity::GroupVelocity;
  throw ConfigError("unknown protocol quantity '" + s + "'");
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

template <class T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

json to_json(const Scenario& sc) {
  json j;
  j["name"] = sc.name;
  j["description"] = sc.description;
  j["engine"] = to_string(sc.engine);
  j["launch"] = to_string(sc.launch);
  j["t_end"] = sc.t_end;
  j["snapshot_times"] = sc.snapshot_times;
  j["claims_lossless"] = sc.claims_lossless;
  j["diagnostics"] = sc.diagnostics;
  j["assumptions"] = sc.assumptions;
  j["pulse"] = {{"center_x0", sc.pulse.center_x0},
                {"sigma", sc.pulse.sigma},
                {"amplitude", sc.pulse.amplitude},
                {"detuning", sc.pulse.detuning},
                {"direction", sc.pulse.direction}};
  json prot = json::array();
  for (const auto& p : sc.medium.protocols) {
    json segs = json::array();
    for (const auto& s : p.segments)
      segs.push_back({{"t_start", s.t_start},
                      {"t_end", s.t_end},
                      {"start", s.start},
                      {"end", s.end},
                      {"shape", to_string(s.shape)}});
    prot.push_back({{"name", p.name}, {"quantity", quantity_name(p.quantity)}, {"segments", segs}});
  }
  json layers = json::array();
  for (const auto& L : sc.medium.layers)
    layers.push_back({{"name", L.name},
                      {"x_start", L.x_start},
                      {"x_end", L.x_end},
                      {"coupling_D", L.coupling_D},
                      {"gamma_e", L.gamma_e},
                      {"gamma_m", L.gamma_m},
                      {"delta_e", L.delta_e},
                      {"delta_R", L.delta_R},
                      {"protocol", L.protocol}});
  j["medium"] = {{"layers", layers}, {"protocols", prot}, {"interface_smoothing", sc.medium.interface_smoothing}};
  j["mb"] = {{"x_min", sc.mb.x_min},
             {"x_max", sc.mb.x_max},
             {"dx", sc.mb.dx},
             {"dt", sc.mb.dt},
             {"sponge_width", sc.mb.sponge_width},
             {"diag_every", sc.mb.diag_every}};
  j["effective"] = {{"x_min", sc.effective.x_min},
                    {"x_max", sc.effective.x_max},
                    {"dx_vacuum", sc.effective.dx_vacuum},
                    {"dt", sc.effective.dt},
                    {"diffusion", sc.effective.diffusion},
                    {"muscl", sc.effective.muscl},
                    {"limiter", to_string(sc.effective.limiter)},
                    {"probes", sc.effective.probes},
                    {"diag_every", sc.effective.diag_every}};
  j["units"] = {{"omega_p_si", sc.units.omega_p_si}};
  if (sc.units.enabled()) {
    j["units"]["length_unit_m"] = sc.units.length_m();
    j["units"]["time_unit_s"] = sc.units.time_s();
  }
  return j;
}

Scenario scenario_from_json(const json& j) {
  check_keys(j, {"name", "description", "engine", "launch", "t_end", "snapshot_times", "claims_lossless",
                 "diagnostics", "assumptions", "pulse", "medium", "mb", "effective", "units", "preset"},
             "scenario");
  Scenario sc;
  try {
    if (j.contains("preset")) sc = preset(j.at("preset").get<std::string>());
    get_if(j, "name", sc.name);
    get_if(j, "description", sc.description);
    if (j.contains("engine")) sc.engine = engine_from_string(j.at("engine").get<std::string>());
    if (j.contains("launch")) sc.launch = launch_from_string(j.at("launch").get<std::string>());
    get_if(j, "t_end", sc.t_end);
    get_if(j, "snapshot_times", sc.snapshot_times);
    get_if(j, "claims_lossless", sc.claims_lossless);
    get_if(j, "diagnostics", sc.diagnostics);
    if (j.contains("assumptions")) sc.assumptions = j.at("assumptions").get<std::map<std::string, std::string>>();
    if (j.contains("pulse")) {
      const json& p = j.at("pulse");
      check_keys(p, {"center_x0", "sigma", "amplitude", "detuning", "direction"}, "pulse");
      get_if(p, "center_x0", sc.pulse.center_x0);
      get_if(p, "sigma", sc.pulse.sigma);
      get_if(p, "amplitude", sc.pulse.amplitude);
      get_if(p, "detuning", sc.pulse.detuning);
      get_if(p, "direction", sc.pulse.direction);
    }
    if (j.contains("medium")) {
      const json& m = j.at("medium");
      check_keys(m, {"layers", "protocols", "interface_smoothing"}, "medium");
      get_if(m, "interface_smoothing", sc.medium.interface_smoothing);
      if (m.contains("protocols")) {
        sc.medium.protocols.clear();
        for (const json& pj : m.at("protocols")) {
          check_keys(pj, {"name", "quantity", "segments"}, "protocol");
          ModulationProtocol p;
          get_if(pj, "name", p.name);
          if (pj.contains("quantity")) p.quantity = quantity_from_string(pj.at("quantity").get<std::string>());
          for (const json& sj : pj.at("segments")) {
            check_keys(sj, {"t_start", "t_end", "start", "end", "shape", "value"}, "segment");
            Segment s;
            get_if(sj, "t_start", s.t_start);
            get_if(sj, "t_end", s.t_end);
            if (sj.contains("value")) s.start = s.end = sj.at("value").get<double>();
            get_if(sj, "start", s.start);
            get_if(sj, "end", s.end);
            if (sj.contains("shape")) s.shape = ramp_shape_from_string(sj.at("shape").get<std::string>());
            p.segments.push_back(s);
          }
          sc.medium.protocols.push_back(p);
        }
      }
      if (m.contains("layers")) {
        sc.medium.layers.clear();
        for (const json& lj : m.at("layers")) {
          check_keys(lj, {"name", "x_start", "x_end", "coupling_D", "gamma_e", "gamma_m", "delta_e", "delta_R", "protocol"},
                     "layer");
          Layer L;
          get_if(lj, "name", L.name);
          get_if(lj, "x_start", L.x_start);
          get_if(lj, "x_end", L.x_end);
          get_if(lj, "coupling_D", L.coupling_D);
          get_if(lj, "gamma_e", L.gamma_e);
          get_if(lj, "gamma_m", L.gamma_m);
          get_if(lj, "delta_e", L.delta_e);
          get_if(lj, "delta_R", L.delta_R);
          get_if(lj, "protocol", L.protocol);
          sc.medium.layers.push_back(L);
        }
      }
    }
    if (j.contains("mb")) {
      const json& m = j.at("mb");
      check_keys(m, {"x_min", "x_max", "dx", "dt", "sponge_width", "diag_every"}, "mb");
      get_if(m, "x_min", sc.mb.x_min);
      get_if(m, "x_max", sc.mb.x_max);
      get_if(m, "dx", sc.mb.dx);
      get_if(m, "dt", sc.mb.dt);
      get_if(m, "sponge_width", sc.mb.sponge_width);
      get_if(m, "diag_every", sc.mb.diag_every);
    }
    if (j.contains("effective")) {
      const json& e = j.at("effective");
      check_keys(e, {"x_min", "x_max", "dx_vacuum", "dt", "diffusion", "muscl", "limiter", "probes", "diag_every"},
                 "effective");
      get_if(e, "x_min", sc.effective.x_min);
      get_if(e, "x_max", sc.effective.x_max);
      get_if(e, "dx_vacuum", sc.effective.dx_vacuum);
      get_if(e, "dt", sc.effective.dt);
      get_if(e, "diffusion", sc.effective.diffusion);
      get_if(e, "muscl", sc.effective.muscl);
      if (e.contains("limiter")) sc.effective.limiter = limiter_from_string(e.at("limiter").get<std::string>());
      get_if(e, "probes", sc.effective.probes);
      get_if(e, "diag_every", sc.effective.diag_every);
    }
    if (j.contains("units")) {
      const json& u = j.at("units");
      check_keys(u, {"omega_p_si", "length_unit_m", "time_unit_s"}, "units");
      get_if(u, "omega_p_si", sc.units.omega_p_si);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return scenario_from_json(j);
}

json to_json(const Grid& g) {
  return {{"x_min", g.x_min},       {"x_max", g.x_max()},          {"n_points", g.n_points},
          {"dx", g.dx},             {"dt", g.dt},                  {"sponge_width", g.sponge_width},
          {"sponge_strength", g.sponge_strength}};
}

json to_json(const EffectiveOptions& o) {
  return {{"x_min", o.x_min},         {"x_max", o.x_max},   {"dx_vacuum", o.dx_vacuum},
          {"dt", o.dt > 0.0 ? o.dt : o.dx_vacuum}, {"diffusion", o.diffusion}, {"muscl", o.muscl},
          {"limiter", to_string(o.limiter)}};
}

OutputFormat format_from_string(const std::string& s) {
  if (s == "text") return OutputFormat::Text;
  if (s == "binary") return OutputFormat::Binary;
  throw ConfigError("unknown output format '" + s + "'");
}

void Table::add_row(std::initializer_list<double> r) {
  if (r.size() != columns.size()) throw ConfigError("table: row width mismatch");
  data.insert(data.end(), r.begin(), r.end());
}

void write_table(const std::filesystem::path& path, const json& header, const Table& t, OutputFormat f) {
  json h = header;
  h["columns"] = t.columns;
  if (f == OutputFormat::Text) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << "# " << h.dump() << "\n# ";
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? " " : "") << t.columns[c];
    out << "\n" << std::setprecision(17);
    const std::size_t nc = t.columns.size();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      for (std::size_t c = 0; c < nc; ++c) out << (c ? " " : "") << t.data[r * nc + c];
      out << "\n";
    }
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  const std::string hs = h.dump();
  const std::uint32_t ver = kBinaryVersion, hlen = static_cast<std::uint32_t>(hs.size());
  const std::uint64_t rows = t.rows();
  const std::uint32_t cols = static_cast<std::uint32_t>(t.columns.size());
  out.write(kBinaryMagic, 8);
  out.write(reinterpret_cast<const char*>(&ver), 4);
  out.write(reinterpret_cast<const char*>(&hlen), 4);
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  out.write(reinterpret_cast<const char*>(&rows), 8);
  out.write(reinterpret_cast<const char*>(&cols), 4);
  out.write(reinterpret_cast<const char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * sizeof(double)));
}

Table read_table(const std::filesystem::path& path, json* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  char magic[8] = {};
  in.read(magic, 8);
  Table t;
  if (in && std::memcmp(magic, kBinaryMagic, 8) == 0) {
    std::uint32_t ver = 0, hlen = 0, cols = 0;
    std::uint64_t rows = 0;
    in.read(reinterpret_cast<char*>(&ver), 4);
    if (ver != kBinaryVersion) throw ConfigError("'" + path.string() + "': unsupported binary version");
    in.read(reinterpret_cast<char*>(&hlen), 4);
    std::string hs(hlen, '\0');
    in.read(hs.data(), hlen);
    in.read(reinterpret_cast<char*>(&rows), 8);
    in.read(reinterpret_cast<char*>(&cols), 4);
    const json h = json::parse(hs);
    t.columns = h.at("columns").get<std::vector<std::string>>();
    if (t.columns.size() != cols) throw ConfigError("'" + path.string() + "': column count mismatch");
    t.data.resize(rows * cols);
    in.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * sizeof(double)));
    if (!in) throw ConfigError("'" + path.string() + "': truncated");
    if (header) *header = h;
    return t;
  }
  in.clear();
  in.seekg(0);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (!have_header) {
        const json h = json::parse(line.substr(1));
        t.columns = h.at("columns").get<std::vector<std::string>>();
        if (header) *header = h;
        have_header = true;
      }
      continue;
    }
    std::istringstream ss(line);
    double v;
    while (ss >> v) t.data.push_back(v);
  }
  if (!have_header) throw ConfigError("'" + path.string() + "': missing header");
  return t;
}

Table snapshot_table(const FieldState& s, const Grid& g) {
  Table t;
  t.columns = {"x", "re_E", "im_E", "abs2_E", "re_rho_eg", "im_rho_eg", "re_rho_mg", "im_rho_mg"};
  t.data.reserve(s.E.size() * t.columns.size());
  for (std::size_t i = 0; i < s.E.size(); ++i)
    t.add_row({g.x(i), s.E[i].real(), s.E[i].imag(), std::norm(s.E[i]), s.rho_eg[i].real(), s.rho_eg[i].imag(),
               s.rho_mg[i].real(), s.rho_mg[i].imag()});
  return t;
}

Table snapshot_table(const IntensityState& s, const EffectiveMesh& mesh, const MediumProfile& m) {
  Table t;
  t.columns = {"x", "I", "v_gr", "n_p"};
  t.data.reserve(mesh.size() * 4);
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const int l = mesh.layer[i];
    const double v = l < 0 ? 1.0 : m.velocity(l, s.t);
    t.add_row({mesh.centers[i], s.I[i], v, v > 0.0 ? s.I[i] / v : 0.0});
  }
  return t;
}

Table diagnostics_table(const std::vector<DiagnosticSample>& d) {
  Table t;
  t.columns = {"t", "N_pol", "x_peak", "peak_abs2_E", "W_em", "W_at"};
  for (const auto& r : d) t.add_row({r.t, r.n_pol, r.x_peak, r.peak, r.w_em, r.w_at});
  return t;
}

Table diagnostics_table(const std::vector<IntensityDiagnostic>& d) {
  Table t;
  t.columns = {"t", "content", "integral_I", "x_peak", "peak_I"};
  for (const auto& r : d) t.add_row({r.t, r.content, r.integral, r.x_peak, r.peak});
  return t;
}

}  // namespace eit
