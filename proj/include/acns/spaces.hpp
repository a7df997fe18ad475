#pragma once
// Grid fields, inner products and norms, the operator A_theta, the
// solenoidal/Neumann spectral spaces and their Galerkin eigenbasis.

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "acns/domain.hpp"

namespace acns {

struct ScalarField {
  GeometryPtr geom;
  std::vector<double> v;
  bool neumann = false;

  ScalarField() = default;
  explicit ScalarField(GeometryPtr g, bool neumann_flag = false)
      : geom(std::move(g)), v(geom->size(), 0.0), neumann(neumann_flag) {}
};

struct VectorField {
  GeometryPtr geom;
  std::vector<double> x;
  std::vector<double> y;
  bool div_free = false;

  VectorField() = default;
  explicit VectorField(GeometryPtr g, bool div_free_flag = false)
      : geom(std::move(g)), x(geom->size(), 0.0), y(geom->size(), 0.0), div_free(div_free_flag) {}
};

// d/dx ux, d/dy ux, d/dx uy, d/dy uy
struct VectorGrad {
  std::vector<double> xx, xy, yx, yy;
};

template <class F>
ScalarField sample(GeometryPtr g, F&& f, bool neumann = false) {
  ScalarField s(g, neumann);
  for (int j = 0; j < g->ny; ++j)
    for (int i = 0; i < g->nx; ++i) s.v[g->index(i, j)] = f(g->x[i], g->y[j]);
  return s;
}

template <class F>
VectorField sample_vector(GeometryPtr g, F&& f, bool div_free = false) {
  VectorField u(g, div_free);
  for (int j = 0; j < g->ny; ++j)
    for (int i = 0; i < g->nx; ++i) {
      const auto [a, b] = f(g->x[i], g->y[j]);
      u.x[g->index(i, j)] = a;
      u.y[g->index(i, j)] = b;
    }
  return u;
}

// collocation derivatives of grid values
std::vector<double> ddx(const ChannelGeometry& g, std::span<const double> f);
std::vector<double> ddy(const ChannelGeometry& g, std::span<const double> f);
VectorGrad gradient(const VectorField& u);
std::vector<double> divergence(const VectorField& u);
// 2*nx samples (bottom then top)
std::vector<double> normal_trace(const VectorField& u);
std::vector<double> tangential_trace(const VectorField& u);
std::vector<double> wall_values(const ScalarField& s);
std::vector<double> normal_derivative(const ScalarField& s);

double integrate(const ChannelGeometry& g, std::span<const double> f);
double l2_inner(const ScalarField& a, const ScalarField& b);
double l2_inner(const VectorField& a, const VectorField& b);
// ((v,z)) = 2(Dv,Dz) + alpha * int_Gamma v.z
double slip_inner(const VectorField& v, const VectorField& z, double alpha);
double grad_inner(const ScalarField& a, const ScalarField& b);

struct Norms {
  double l2 = 0, h1 = 0, h2 = 0, l4 = 0, linf = 0, boundary_l2 = 0;
  double grad_l2 = 0;  // |grad f|
  double grad_l4 = 0;  // || |grad f| ||_{L4}
};
Norms norms(const ScalarField& f);
Norms norms(const VectorField& u);
double lp_norm(const ChannelGeometry& g, std::span<const double> f, double p);

// A_theta phi = -lap phi + theta phi; requires the Neumann flag
ScalarField a_theta_apply(const ScalarField& phi, double theta);
double div_residual(const VectorField& u);
double neumann_residual(const ScalarField& f);

// sqrt( sum_walls sum_k (1+k^2)^s |g_k|^2 ), g_k = (1/Nx) sum g e^{-ikx}
double hilbert_boundary_norm(const ChannelGeometry& g, std::span<const double> samples, double s);
// |a|_{1-1/p} + |da|_{1/2} + |b|_{-1/p} + |b|_{0} + |db|_{-1/2}, Hilbert surrogates
double hp_gamma_norm(const ChannelGeometry& g, std::span<const double> a, std::span<const double> b,
                     std::span<const double> dta, std::span<const double> dtb, double p);

enum class ModeKind { velocity, phase };

struct ModeInfo {
  ModeKind kind = ModeKind::velocity;
  int k = 0;
  int parity = 0;  // 0: cos, 1: sin
  int column = 0;  // column inside the velocity or phase tables
  double lambda = 0.0;
};

// Grid tables for a list of modes, one column per mode.
struct VelocityTable {
  Eigen::MatrixXd ux, uy, ux_x, ux_y, uy_x, uy_y;
  Eigen::MatrixXd tang;  // 2*nx x m, w.tau on the walls
};
struct PhaseTable {
  Eigen::MatrixXd f, f_x, f_y;
};

// All discrete modes of the truncated spaces, sorted by eigenvalue
// (velocity before phase on ties, then k, then parity).
struct Spectrum {
  GeometryPtr geom;
  double alpha = 1.0;
  double theta = 1.0;
  std::vector<ModeInfo> order;
  std::vector<double> lambda_v, lambda_p;
  VelocityTable vel;
  PhaseTable phase;
  // block data: per k the assembled stiffness/mass and eigenvectors
  struct Block {
    Eigen::MatrixXd stiff, mass, vecs;
  };
  std::vector<Block> vblocks, pblocks;

  int dim() const { return static_cast<int>(order.size()); }
  int velocity_dim() const { return static_cast<int>(lambda_v.size()); }
  int phase_dim() const { return static_cast<int>(lambda_p.size()); }
};

Spectrum build_spectrum(GeometryPtr geom, double alpha, double theta);

struct GalerkinBasis {
  GeometryPtr geom;
  double alpha = 1.0;
  double theta = 1.0;
  int n = 0;
  std::vector<ModeInfo> modes;  // first n of the spectrum order; column indexes local
  Eigen::VectorXd lambda_v, lambda_p;
  VelocityTable vel;
  PhaseTable phase;
  int nv() const { return static_cast<int>(lambda_v.size()); }
  int np() const { return static_cast<int>(lambda_p.size()); }
};

GalerkinBasis galerkin_basis(const Spectrum& spec, int n);

VectorField velocity_mode(const GalerkinBasis& b, int col);
ScalarField phase_mode(const GalerkinBasis& b, int col);
VectorField reconstruct_velocity(const GalerkinBasis& b, const Eigen::VectorXd& beta);
ScalarField reconstruct_phase(const GalerkinBasis& b, const Eigen::VectorXd& chi);

// (e_i, e_j)_Y and the V form ((e_i, e_j)) for modes of the basis,
// evaluated by grid quadrature from the stored tables
double mode_y_inner(const GalerkinBasis& b, int i, int j);
double mode_v_inner(const GalerkinBasis& b, int i, int j);

// L2 projection onto the discrete solenoidal space with u.n = 0
VectorField project_div_free(const Spectrum& spec, const VectorField& w);

// coefficient-space helpers used by the dynamics
Eigen::VectorXd project_velocity(const GalerkinBasis& b, const VectorField& u);
Eigen::VectorXd phase_load(const GalerkinBasis& b, std::span<const double> grid_values);

// matrix dump for debugging: header "n,<n>" then "lambda,..." then rows
void export_basis_csv(const GalerkinBasis& b, const std::string& path);

}  // namespace acns
