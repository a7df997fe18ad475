#pragma once
// Stationary Stokes lifting with prescribed normal flux and Navier-slip
// tangential stress, solved per Fourier mode in x.

#include <span>
#include <vector>

#include "acns/boundary_control.hpp"
#include "acns/spaces.hpp"

namespace acns {

struct StokesLift {
  VectorField a;
  VectorGrad grad;  // analytic gradient
  ScalarField p;
};

// a, b: 2*nx wall samples (bottom then top). a is the prescribed a.n,
// b the prescribed [2D(a)n + alpha a].tau.
StokesLift solve_stokes_lift(GeometryPtr geom, std::span<const double> a, std::span<const double> b, double alpha);

struct LiftResiduals {
  double momentum = 0, divergence = 0, normal = 0, slip = 0;
  double max() const;
};
// relative residuals measured with collocation differentiation on the grid
LiftResiduals lift_residuals(const StokesLift& lift, std::span<const double> a, std::span<const double> b,
                             double alpha);

// Lifting of a time-dependent control, built from one unit lift per spatial
// coefficient of the control layout.
class LiftingField {
 public:
  LiftingField() = default;
  LiftingField(GeometryPtr geom, double alpha, BoundaryControl ctrl);

  struct Sample {
    VectorField a;
    VectorGrad grad;
    VectorField dta;
    ScalarField p;
  };
  Sample at(double t) const;
  void coefficients(double t, Eigen::VectorXd& s, Eigen::VectorXd& ds) const { ctrl_.eval(t, s, ds); }

  const BoundaryControl& control() const { return ctrl_; }
  const std::vector<StokesLift>& units() const { return units_; }
  const GeometryPtr& geom() const { return geom_; }
  double alpha() const { return alpha_; }
  bool is_zero() const { return ctrl_.is_zero(); }

 private:
  GeometryPtr geom_;
  double alpha_ = 1.0;
  BoundaryControl ctrl_;
  std::vector<StokesLift> units_;
};

struct LiftEstimate {
  std::vector<double> t, ratio;
  double sup = 0.0;
};
// (|a|_{W^1_p} + |d_t a|_{L2}) / |(a,b)|_{H_p(Gamma)} at the given times
LiftEstimate lift_estimate_ratio(const LiftingField& lift, std::span<const double> times, double p);

// grid dump: x,y,ax,ay,p
void export_lift_csv(const LiftingField::Sample& s, const std::string& path);

}  // namespace acns
