#pragma once
// Boundary data (a, b) on the two walls as truncated Fourier series whose
// coefficients are natural cubic splines in time.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "acns/domain.hpp"

namespace acns {

// Per-knot parameter layout, repeated for bottom then top wall:
//   a_cos[1..kc], a_sin[1..kc], b_0, b_cos[1..kc], b_sin[1..kc]
struct ControlLayout {
  int kc = 1;
  int per_wall() const { return 4 * kc + 1; }
  int per_knot() const { return 2 * per_wall(); }
  int a_cos(int wall, int k) const { return wall * per_wall() + (k - 1); }
  int a_sin(int wall, int k) const { return wall * per_wall() + kc + (k - 1); }
  int b_0(int wall) const { return wall * per_wall() + 2 * kc; }
  int b_cos(int wall, int k) const { return wall * per_wall() + 2 * kc + 1 + (k - 1); }
  int b_sin(int wall, int k) const { return wall * per_wall() + 3 * kc + 1 + (k - 1); }
};

// Wall samples (2*nx each, bottom then top) of one spatial basis function.
struct BoundarySamples {
  std::vector<double> a, b;
};
BoundarySamples layout_basis_samples(const ChannelGeometry& g, const ControlLayout& layout, int j);

class BoundaryControl {
 public:
  BoundaryControl() = default;
  // coeffs: knots x per_knot
  BoundaryControl(ControlLayout layout, std::vector<double> knots, Eigen::MatrixXd coeffs);

  static BoundaryControl zero(int kc, double T);

  const ControlLayout& layout() const { return layout_; }
  const std::vector<double>& knots() const { return knots_; }
  const Eigen::MatrixXd& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.cwiseAbs().maxCoeff() == 0.0; }

  // spatial coefficients s_j(t) and their time derivatives
  void eval(double t, Eigen::VectorXd& s, Eigen::VectorXd& ds) const;

  // wall samples at time t
  BoundarySamples samples(const ChannelGeometry& g, double t) const;
  BoundarySamples dt_samples(const ChannelGeometry& g, double t) const;
  double hp_norm(const ChannelGeometry& g, double t, double p) const;

  BoundaryControl scaled(double factor) const;

 private:
  ControlLayout layout_;
  std::vector<double> knots_;
  Eigen::MatrixXd coeffs_;
  Eigen::MatrixXd second_;  // spline second derivatives at the knots
};

BoundarySamples combine_samples(const ChannelGeometry& g, const ControlLayout& layout, const Eigen::VectorXd& s);

}  // namespace acns
