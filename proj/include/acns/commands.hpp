#pragma once
// The four batch commands behind the CLI. Each writes its artifacts under
// cfg.out and returns a process exit code.

#include <iosfwd>
#include <string>
#include <vector>

#include "acns/config.hpp"
#include "acns/energy_monitor.hpp"
#include "acns/ineq_audit.hpp"
#include "acns/noise.hpp"

namespace acns {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfigError = 2 };

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// pass predicates, kept separate so they can be exercised on synthetic reports
// residuals finite and decreasing, slope >= 0.8, smallest-dt residual < 1e-3 E0
CheckResult check_dissipation(const DissipationReport& r);
// finite constants, no Jensen violations, spread below 2 between the two levels
CheckResult check_estimates(const std::vector<EstimateReport>& coarse_fine_second,
                            const std::vector<EstimateReport>& coarse_fine_fourth);
CheckResult check_strong_order(const StrongOrderReport& r, double min_slope = 0.45);
CheckResult check_perturbation(const PerturbationReport& r);
CheckResult check_h1(const H1Audit& r);
CheckResult check_audit(const std::vector<RatioReport>& r);

// smooth Neumann direction cos x cos(pi y) in phase coefficients
Eigen::VectorXd phase_perturbation(const GalerkinSystem& sys);

int cmd_simulate(const RunConfig& c, std::ostream& log);
int cmd_verify(const RunConfig& c, std::ostream& log);
int cmd_optimize(const RunConfig& c, const std::string& resume, std::ostream& log);
int cmd_audit(const RunConfig& c, std::ostream& log);

}  // namespace acns
