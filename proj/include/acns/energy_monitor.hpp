#pragma once
// Weights G, H and sigma_h, Monte-Carlo checks of the second and fourth moment
// a priori estimates, the weighted stability distance and stopping times.

#include <span>
#include <string>
#include <vector>

#include "acns/dynamics.hpp"

namespace acns {

// G(t_k) = exp(-C0 t_k - C0 int_0^{t_k} ftilde), trapezoid rule
std::vector<double> weight_G(std::span<const double> t, std::span<const double> ftilde, double C0);

struct MeanCI {
  double mean = 0, se = 0, lo = 0, hi = 0;
};
// sample mean with a 95% normal interval
MeanCI mean_ci(std::span<const double> x);

struct EstimateReport {
  std::string name;
  int paths = 0;
  MeanCI lhs, rhs;
  double C_hat = 0, C_lo = 0, C_hi = 0;  // ratio estimator with delta-method interval
  bool finite = false;
  int jensen_violations = 0;  // only for the fourth-moment check
  std::vector<double> lhs_path, rhs_path;
};

// E sup G^2 |(u,phi)|_Y^2 + E int G^2 |(u,phi)|_V^2  against  E E(u0,phi0) + E int G^2 Lambda
EstimateReport estimate_check_L41(const std::vector<EnergyTrace>& ens, std::span<const double> E0);
// E sup G^4 |.|_Y^4 + E (int G^2 |.|_V^2)^2  against  E E(u0,phi0)^2 + E int G^4 B
EstimateReport estimate_check_L42(const std::vector<EnergyTrace>& ens, std::span<const double> E0);
// E0 taken from the first record of every trace
EstimateReport estimate_check_L41(const std::vector<EnergyTrace>& ens);
EstimateReport estimate_check_L42(const std::vector<EnergyTrace>& ens);

struct RefinementReport {
  std::vector<double> C;
  double spread = 0;  // max / min
  bool pass = false;
};
// PASS iff every fitted constant is finite and positive and max/min < factor
RefinementReport refinement_stability(const std::vector<EstimateReport>& levels, double factor = 2.0);

struct DissipationReport {
  std::vector<double> dt, residual;  // max_t |residual| per dt
  double E0 = 0;
  double slope = 0;  // least-squares log-log slope
};
DissipationReport dissipation_study(const GalerkinSystem& sys, const GalerkinState& init, double T,
                                    std::span<const double> dts, StepOptions opt = {});
double loglog_slope(std::span<const double> x, std::span<const double> y);

// Endpoint strong error against a fine reference driven by the same Brownian
// path: error = sqrt(mean_paths |X_dt(T) - X_ref(T)|_Y^2).
struct StrongOrderReport {
  std::vector<double> dt, error;
  double dt_ref = 0, slope = 0;
  int paths = 0;
};
StrongOrderReport strong_order_study(const GalerkinSystem& sys, const GalerkinState& init, double T,
                                     std::span<const double> dts, double dt_ref, std::uint64_t master_seed,
                                     int paths, StepOptions opt = {});

// Ledger weight of the uniqueness proof, per record. C multiplies every term.
std::vector<double> stability_ftilde(const GalerkinSystem& A, const Trajectory& ta, const GalerkinSystem& B,
                                     const Trajectory& tb, double C);

struct StabilityReport {
  double lhs = 0, rhs = 0, ratio = 0;
  double sup_term = 0, int_term = 0, init_term = 0, ctrl_term = 0;
  std::vector<double> H;
};
// Weighted difference of two runs driven by the same Brownian path.
StabilityReport stability_distance(const GalerkinSystem& A, const Trajectory& ta, const GalerkinSystem& B,
                                   const Trajectory& tb, double C = 1.0, double p = 3.0);
// ensemble means of the per-path sides
struct StabilityEnsemble {
  MeanCI lhs, rhs;
  double ratio = 0;
};
StabilityEnsemble stability_ensemble(const std::vector<StabilityReport>& r);

// Weighted distance between the run from init and runs from init + eps * dchi
// (phase coefficients), all on one Brownian path.
struct PerturbationReport {
  double identical_lhs = 0;  // distance of a run to its own replay
  std::vector<double> eps, lhs, ratio;
  double slope = 0;  // log-log slope of lhs against eps
  double H_end = 1;  // smallest final weight H(T) over the perturbed runs
};
PerturbationReport perturbation_study(const GalerkinSystem& sys, const PathSettings& ps, const GalerkinState& init,
                                      const Eigen::VectorXd& dchi, std::span<const double> eps, std::uint64_t seed,
                                      double C = 1.0);

// h(t) = G^2 E + int G^2 |(u,phi)|_V^2 and tau_N = first grid time with h >= N, else T
std::vector<double> h_weight(const EnergyTrace& tr);
double stopping_time(std::span<const double> t, std::span<const double> h, double N);
double stopping_time_diag(const EnergyTrace& tr, double N);

// sigma_h(t) = exp(-C0 t - int h^2), trapezoid rule
std::vector<double> sigma_h(std::span<const double> t, std::span<const double> h, double C0);

}  // namespace acns
