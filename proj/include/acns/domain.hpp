#pragma once
// Periodic channel [0, 2pi) x [0, 1]: Fourier in x, Gauss-Lobatto-Legendre in y.

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace acns {

enum class Wall { bottom, top };

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct ChannelGeometry {
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  double height = 1.0;
  std::vector<double> x;                 // nx equispaced nodes
  std::vector<double> y;                 // ny GLL nodes on [0,1], y[0]=0, y[ny-1]=1
  std::vector<double> wy;                // GLL weights on [0,1]
  std::vector<double> interior_weights;  // size nx*ny, index j*nx + i
  std::vector<double> wall_weights;      // size nx, identical on both walls
  Eigen::MatrixXd dx;                    // nx x nx Fourier differentiation
  Eigen::MatrixXd dy;                    // ny x ny collocation differentiation
  int y_exactness = 0;                   // wall-normal rule exact up to this degree

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  double area() const { return lx * height; }
  // highest resolved Fourier wavenumber and polynomial degree used by the
  // discrete spaces (2/3 truncation keeps cubic products exactly integrated)
  int kmax() const { return (nx - 1) / 3; }
  int pdeg() const { return (2 * ny - 3) / 3; }
};

using GeometryPtr = std::shared_ptr<const ChannelGeometry>;

GeometryPtr build_geometry(int nx, int ny);

// g holds nx bottom-wall samples followed by nx top-wall samples.
double boundary_integral(const ChannelGeometry& geom, std::span<const double> g);

// Outward normal and tangent (+90 degree rotation of n).
std::pair<Vec2, Vec2> normal_tangent(Wall wall);

// Gauss-Lobatto-Legendre nodes and weights on [-1,1], ascending.
void gll_nodes(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace acns
