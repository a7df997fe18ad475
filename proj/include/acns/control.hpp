#pragma once
// Coefficient-box family of boundary controls, the exponential admissibility
// bound, the tracking cost J and a derivative-free minimizing-sequence search.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "acns/dynamics.hpp"
#include "acns/energy_monitor.hpp"

namespace acns {

// Box of spline knot coefficients. Parameters are flattened knot-major:
// p[k * per_knot + j] is coefficient j of the layout at knot k.
struct AdmissibleFamily {
  ControlLayout layout;
  std::vector<double> knots;
  std::vector<double> lo, hi;
  double C0 = 1.0;
  double delta = 10.0;  // admissibility budget
  double p = 3.0;       // exponent of the boundary norm
  double T = 0.1;
  int quad_points = 101;  // time samples for int_0^T |(a,b)|^2

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(std::span<const double> params, double tol = 1e-12) const;
  void validate() const;
  // symmetric box [-bound, bound] on every coefficient
  static AdmissibleFamily symmetric(ControlLayout layout, std::vector<double> knots, double bound, double T);
};

// coefficient table plus the requested wall means of a (must vanish)
struct CoefficientTable {
  std::vector<double> params;
  std::vector<double> a_mean;  // optional, per knot and wall
};

BoundaryControl synthesize_control(std::span<const double> params, const AdmissibleFamily& family);
BoundaryControl synthesize_control(const CoefficientTable& table, const AdmissibleFamily& family);

struct Admissibility {
  double exponent = 0;  // 4 C0 int_0^T |(a,b)|^2_{H_p}
  double value = 1;     // exp(exponent)
  double margin = 0;    // delta - value
  bool pass = false;
};
Admissibility admissibility_check(const BoundaryControl& ctrl, const ChannelGeometry& g, double C0, double delta,
                                  double T, double p = 3.0, int quad_points = 101);
// scale s with exp(4 C0 int |(s a, s b)|^2) = delta, found by bisection
double tight_scale(const BoundaryControl& ctrl, const ChannelGeometry& g, double C0, double delta, double T,
                   double p = 3.0, int quad_points = 101);
// upper bound of the exponent over the whole box (triangle inequality on the
// basis functions); the family respects the budget when exp(bound) < delta
double family_exponent_bound(const AdmissibleFamily& family, const ChannelGeometry& g);

// Targets on the trajectory grid, stored as Galerkin coefficients.
struct Targets {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> beta, chi, lift;
};
Targets zero_targets(const GalerkinSystem& sys, const std::vector<double>& t);
// ensemble mean of the trajectories
Targets mean_targets(const std::vector<Trajectory>& paths);

enum class TrackingNorm { graded, l2 };

struct CostWeights {
  double lambda1 = 0.0, lambda2 = 0.0;
  TrackingNorm norm = TrackingNorm::graded;
};

struct CostReport {
  double J = 0, tracking = 0, penalty = 0;
  std::vector<double> per_path;
  MeanCI ci;
};
// J = E int 1/2 (|v - v_d|^2 + |phi - phi_d|_1^2) + int_{Gamma_T} 1/2 (l1 a^2 + l2 b^2)
CostReport cost_J(const GalerkinSystem& sys, const std::vector<Trajectory>& paths, const Targets& targets,
                  const BoundaryControl& ctrl, const CostWeights& w);
// the boundary penalty alone
double control_penalty(const ChannelGeometry& g, const BoundaryControl& ctrl, std::span<const double> t,
                       double lambda1, double lambda2);

struct OptimizerConfig {
  int budget = 200;
  int lhs_seeds = 4;       // Latin-hypercube restart points
  double step0 = 0.25;     // initial step as a fraction of the box width
  double min_step = 1e-3;  // restart once every step is below this fraction
  std::uint64_t seed = 7;
};

struct Evaluation {
  std::vector<double> params;
  double J = 0, se = 0;
  bool admissible = true;
  double best_so_far = 0;
};

struct OptimizerRecord {
  std::vector<Evaluation> history;
  std::vector<double> best_params;
  double best_J = 0;
  int best_index = -1;
  long rng_cursor = 0;  // uniforms drawn for the Latin-hypercube seeds
};

using Objective = std::function<CostReport(const BoundaryControl&)>;
// called after every recorded evaluation, e.g. to write a checkpoint
using Progress = std::function<void(const OptimizerRecord&)>;

// Hooke-Jeeves pattern search (coordinate sweeps, pattern moves, halving
// steps) restarted from Latin-hypercube seeds. Evaluations
// already present in `resume` are replayed instead of recomputed.
OptimizerRecord optimize(const AdmissibleFamily& family, const ChannelGeometry& g, const Objective& J,
                         const OptimizerConfig& cfg, const OptimizerRecord* resume = nullptr,
                         const Progress& progress = {});

// Latin-hypercube points in the unit cube
std::vector<std::vector<double>> latin_hypercube(int points, int dim, Rng& rng, long* cursor = nullptr);

}  // namespace acns
