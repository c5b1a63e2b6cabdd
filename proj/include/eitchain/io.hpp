#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "eitchain/effective_flow.hpp"
#include "eitchain/mb_solver.hpp"
#include "eitchain/scenarios.hpp"

namespace eit {

using json = nlohmann::json;

json to_json(const Scenario& sc);
// Missing keys keep the defaults of Scenario; unknown keys are rejected so
// that typos do not silently fall back to defaults.
Scenario scenario_from_json(const json& j);
Scenario load_scenario(const std::filesystem::path& path);

json to_json(const Grid& g);
json to_json(const EffectiveOptions& o);

enum class OutputFormat { Text, Binary };
OutputFormat format_from_string(const std::string& s);

// Row-major table of doubles.
struct Table {
  std::vector<std::string> columns;
  std::vector<double> data;
  std::size_t rows() const { return columns.empty() ? 0 : data.size() / columns.size(); }
  void add_row(std::initializer_list<double> r);
};

// Text: '#'-prefixed header lines (the JSON header on one line, then the
// column names), whitespace-separated rows.  Binary: magic "EITCHAIN",
// uint32 version, uint32 header length, header JSON, uint64 rows,
// uint32 columns, then little-endian doubles.
void write_table(const std::filesystem::path& path, const json& header, const Table& t, OutputFormat f);
Table read_table(const std::filesystem::path& path, json* header = nullptr);

inline constexpr char kBinaryMagic[8] = {'E', 'I', 'T', 'C', 'H', 'A', 'I', 'N'};
inline constexpr std::uint32_t kBinaryVersion = 1;

Table snapshot_table(const FieldState& s, const Grid& g);
Table snapshot_table(const IntensityState& s, const EffectiveMesh& mesh, const MediumProfile& m);
Table diagnostics_table(const std::vector<DiagnosticSample>& d);
Table diagnostics_table(const std::vector<IntensityDiagnostic>& d);

}  // namespace eit
