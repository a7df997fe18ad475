#pragma once
// CSV and JSON output, the run manifest, optimizer checkpoints and target files.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "acns/config.hpp"
#include "acns/control.hpp"
#include "acns/energy_monitor.hpp"
#include "acns/ineq_audit.hpp"

namespace acns {

inline constexpr const char* kVersion = "0.1.0";

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// round-trip formatting (%.17g)
std::string fmt(double x);

// t, beta_i, chi_i, s_j, then the energy record columns
std::vector<std::string> trajectory_columns(const Trajectory& tr);
void write_trajectory_csv(const std::string& path, const Trajectory& tr);
// energy record columns only
void write_trace_csv(const std::string& path, const EnergyTrace& tr);

// Reads beta_*, chi_*, s_* columns of one or more trajectory CSVs and averages
// them record by record. All files must share the time grid.
Targets read_targets_csv(const std::vector<std::string>& paths);

nlohmann::json to_json(const MeanCI& m);
nlohmann::json to_json(const EstimateReport& r);
nlohmann::json to_json(const RefinementReport& r);
nlohmann::json to_json(const DissipationReport& r);
nlohmann::json to_json(const StabilityReport& r);
nlohmann::json to_json(const RatioReport& r);
nlohmann::json to_json(const CostReport& r);
nlohmann::json to_json(const Admissibility& a);
nlohmann::json to_json(const OptimizerRecord& r);
OptimizerRecord optimizer_record_from_json(const nlohmann::json& j);

// FNV-1a of the canonical config text, as 16 hex digits
std::string config_hash(const RunConfig& c);
// config, version, hash and the per-path seeds actually used
nlohmann::json manifest(const RunConfig& c, const std::string& command, const std::vector<std::uint64_t>& path_seeds);
// column descriptions of the CSV outputs
nlohmann::json output_schema();

// write through a temporary file and rename
void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

}  // namespace acns
