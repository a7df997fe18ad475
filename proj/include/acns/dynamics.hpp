#pragma once
// Galerkin system for (u_n, phi_n) with v_n = u_n + lift, semi-implicit
// Euler-Maruyama time stepping.

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "acns/lifting.hpp"
#include "acns/noise.hpp"
#include "acns/phasefield.hpp"

namespace acns {

// trilinear b(v,w,z) = int (v.grad) w . z
double convect(const VectorField& v, const VectorField& w, const VectorField& z);
// (mu grad phi, w)
double capillary(const ScalarField& mu, const ScalarField& phi, const VectorField& w);
// component i = int_Gamma b (w_i . tau)
Eigen::VectorXd boundary_forcing(std::span<const double> b, const GalerkinBasis& basis);

struct GalerkinState {
  double t = 0.0;
  Eigen::VectorXd beta;  // velocity coefficients (L2-orthonormal modes)
  Eigen::VectorXd chi;   // phase coefficients (a_theta-orthonormal modes)
  int n() const { return static_cast<int>(beta.size() + chi.size()); }
};

// per-record energy bookkeeping
struct EnergyRecord {
  double t = 0;
  double E = 0, Etilde = 0, Y2 = 0, V2 = 0, mu2 = 0;
  double u2 = 0, u_slip = 0, grad_phi2 = 0, phi_h2 = 0, grad_phi_l4 = 0, phi_l2sq = 0;
  double lift_l2sq = 0, lift_slip = 0, hp = 0;
  double Lambda = 1, B = 1, ftilde = 0, G = 1;
  double source = 0;      // S(t): lift, nonlinear and Ito-correction terms of the balance
  double martingale = 0;  // 2 sum_k (g^k, u) dW_k over the step leaving this record
  double residual = 0;    // balance residual up to this record
};

struct EnergyTrace {
  std::vector<EnergyRecord> rec;
  double C0 = 1.0;
};

struct Trajectory {
  std::vector<GalerkinState> states;
  std::vector<Eigen::VectorXd> mu;    // mu_n coefficients in the phase modes
  std::vector<Eigen::VectorXd> lift;  // lift coefficients s(t)
  EnergyTrace trace;
};

class StepFailure : public std::runtime_error {
 public:
  StepFailure(double t, GalerkinState snapshot)
      : std::runtime_error("non-finite coefficients at t = " + std::to_string(t)),
        time(t),
        state(std::move(snapshot)) {}
  double time;
  GalerkinState state;
};

enum class TimeQuadrature { left, right, trapezoid };

struct StepOptions {
  bool nonlinear = true;  // false drops convection, capillary, f_theta and advection
  double implicitness = 0.5;  // theta-weight of the linear parts: 0.5 Crank-Nicolson, 1 backward Euler
  double p = 3.0;         // exponent recorded for the boundary norm
  double C0 = 1.0;
  TimeQuadrature quadrature = TimeQuadrature::right;
};

// Shared immutable operators for one configuration.
class GalerkinSystem {
 public:
  GalerkinSystem(std::shared_ptr<const GalerkinBasis> basis, PotentialSpec pot,
                 std::shared_ptr<const LiftingField> lift, NoiseModel noise);

  const GalerkinBasis& basis() const { return *basis_; }
  const PotentialSpec& potential() const { return pot_; }
  const LiftingField* lift() const { return lift_.get(); }
  const NoiseModel& noise() const { return noise_; }
  int lift_dim() const { return static_cast<int>(lift_l2_.rows()); }

  // Gram data of the unit lifts
  const Eigen::MatrixXd& lift_l2() const { return lift_l2_; }
  const Eigen::MatrixXd& lift_slip() const { return lift_slip_; }
  const Eigen::MatrixXd& lift_proj() const { return lift_proj_; }
  const Eigen::MatrixXd& lift_slip_proj() const { return lift_slip_proj_; }
  const Eigen::MatrixXd& bforce() const { return bforce_; }

  struct Eval {
    Eigen::VectorXd fv;    // velocity forcing F_i
    Eigen::VectorXd fp;    // (f_theta(phi), psi_j)
    Eigen::VectorXd adv;   // (v.grad phi, psi_j)
    Eigen::VectorXd mu;    // mu coefficients
    Eigen::MatrixXd G;     // noise coefficients, nv x m
    Eigen::VectorXd s, ds; // lift coefficients
    EnergyRecord rec;
  };
  Eval evaluate(const GalerkinState& st, const StepOptions& opt) const;

  GalerkinState em_step(const GalerkinState& st, double dt, std::span<const double> dW, const StepOptions& opt,
                        Eval* eval_out = nullptr) const;

  // u_0 = 0 unless amplitudes given; phi_0 the projected stripe profile
  GalerkinState initial_state(double stripe_amp, double stripe_width, double u_amp) const;
  GalerkinState project_initial(const VectorField& u0, const ScalarField& phi0) const;

  // mu coefficients and energy record for a state
  EnergyRecord diagnostics(const GalerkinState& st, const StepOptions& opt) const;

 private:
  std::shared_ptr<const GalerkinBasis> basis_;
  PotentialSpec pot_;
  std::shared_ptr<const LiftingField> lift_;
  NoiseModel noise_;
  Eigen::MatrixXd lift_l2_, lift_slip_, lift_proj_, lift_slip_proj_, bforce_;
  std::vector<double> w_;
  // unit-lift grid tables (G x J)
  Eigen::MatrixXd Lx_, Ly_, Lxx_, Lxy_, Lyx_, Lyy_;
};

struct PathSettings {
  double T = 0.25;
  double dt = 1e-3;
  StepOptions opt;
};

// Steps the system over [0,T]; increments come from the Brownian path,
// summing `stride` fine increments per step.
Trajectory simulate_path(const GalerkinSystem& sys, const PathSettings& ps, const GalerkinState& init,
                         const BrownianPath& bm, long stride = 1);
Trajectory simulate_path(const GalerkinSystem& sys, const PathSettings& ps, const GalerkinState& init,
                         std::uint64_t seed);

// M paths with seeds path_seed(master, i); failed paths are listed, not dropped silently
struct EnsembleResult {
  struct Failure {
    int path = 0;
    double t = 0;
    std::string what;
  };
  std::vector<Trajectory> paths;  // successful paths in index order
  std::vector<int> ids;
  std::vector<Failure> failures;
};
EnsembleResult run_ensemble(const GalerkinSystem& sys, const PathSettings& ps, const GalerkinState& init,
                            std::uint64_t master_seed, int M, int threads = 1);

// fills G and the balance residual from the raw record fields
void finalize_trace(EnergyTrace& tr, double C0, TimeQuadrature q);

// Y-norm of a state difference
double y_distance2(const GalerkinSystem& sys, const GalerkinState& a, const GalerkinState& b);

}  // namespace acns
