#pragma once
// Run configuration: JSON text with nested sections, validated up front.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "acns/control.hpp"

namespace acns {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& msg)
      : std::runtime_error(field + ": " + msg), field(field) {}
  std::string field;
};

struct RunConfig {
  // geometry and basis
  int nx = 24, ny = 16;
  double alpha = 1.0;
  int n = 32;
  // time and ensemble
  double T = 0.2, dt = 1e-3;
  int paths = 4;
  std::uint64_t seed = 1;
  int threads = 1;
  double implicitness = 0.5;
  double p = 3.0;
  PotentialSpec potential;
  std::vector<NoiseChannel> noise;
  double noise_K = -1.0;  // negative: default 2 max((sum sigma)^2, (sum |h|)^2)
  // initial data
  double stripe_amp = 1.0, stripe_width = 0.3, u_amp = 0.0;
  // control used by simulate, and the box searched by optimize
  int kc = 1;
  std::vector<double> knots{0.0};
  std::vector<double> control;  // knot-major coefficients; empty means zero control
  double box_bound = 0.5;
  // targets: "zero", "control" (simulate target_control), or "csv"
  std::string targets = "zero";
  std::vector<double> target_control;
  std::vector<std::string> target_csv;
  double C0 = 1.0, delta = 10.0, lambda1 = 0.0, lambda2 = 0.0;
  std::string tracking = "graded";
  OptimizerConfig optimizer;
  // verification
  std::vector<double> verify_dts{4e-3, 2e-3, 1e-3};
  // multiplier of the uniqueness ledger weight; small enough that H(T) stays O(1)
  double stability_C = 1e-4;
  int audit_samples = 200;
  double audit_decay = 2.0;
  int audit_nx = 16, audit_ny = 12;
  std::string out = "out";

  void validate() const;  // throws ConfigError naming the field
};

nlohmann::json to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);
// parse errors report line and column
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& c);

// helpers deriving library objects from a configuration
NoiseModel noise_model(const RunConfig& c);
AdmissibleFamily family_of(const RunConfig& c);
BoundaryControl control_of(const RunConfig& c, const std::vector<double>& coeffs);
CostWeights weights_of(const RunConfig& c);
PathSettings path_settings(const RunConfig& c);

// geometry, spectrum and Galerkin basis shared by every run of a configuration
struct Workbench {
  GeometryPtr geom;
  std::shared_ptr<const Spectrum> spec;
  std::shared_ptr<const GalerkinBasis> basis;
};
Workbench make_workbench(const RunConfig& c);
// zero controls still carry the lift tables so cost comparisons share one layout
std::shared_ptr<const GalerkinSystem> make_system(const RunConfig& c, const Workbench& wb, const BoundaryControl& ctrl);

}  // namespace acns
