#include "acns/domain.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "acns/legendre.hpp"

namespace acns {

void gll_nodes(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 2) throw std::invalid_argument("gll_nodes: need at least 2 nodes");
  const int N = n - 1;
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  std::vector<double> p, dp;
  for (int i = 0; i < n; ++i) {
    // Chebyshev-Gauss-Lobatto start, Newton on (1-s^2) P_N'(s)
    double s = -std::cos(std::numbers::pi * i / N);
    if (i > 0 && i < N) {
      for (int it = 0; it < 100; ++it) {
        legendre::eval(N, s, p, dp);
        // roots of P_N': use q = P_{N-1} - P_{N+1} style update via
        // (1-s^2) P_N'' = 2 s P_N' - N(N+1) P_N
        const double f = dp[N];
        const double d2 = (2.0 * s * dp[N] - N * (N + 1.0) * p[N]) / (1.0 - s * s);
        const double ds = f / d2;
        s -= ds;
        if (std::abs(ds) < 1e-16) break;
      }
    }
    nodes[i] = s;
    const double pn = legendre::value(N, s);
    weights[i] = 2.0 / (N * (N + 1.0) * pn * pn);
  }
  nodes[0] = -1.0;
  nodes[N] = 1.0;
}

namespace {

Eigen::MatrixXd fourier_diff(int n) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const double h = 2.0 * std::numbers::pi / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double sgn = ((i - j) % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = 0.5 * sgn / std::tan(0.5 * (i - j) * h);
    }
  return d;
}

// barycentric differentiation on arbitrary distinct nodes
Eigen::MatrixXd poly_diff(const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  std::vector<double> w(n, 1.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (k != j) w[j] /= (y[j] - y[k]);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      d(i, j) = (w[j] / w[i]) / (y[i] - y[j]);
      diag -= d(i, j);
    }
    d(i, i) = diag;
  }
  return d;
}

}  // namespace

GeometryPtr build_geometry(int nx, int ny) {
  if (nx < 4 || nx % 2 != 0)
    throw std::invalid_argument("build_geometry: Nx must be even and >= 4, got " +
                                std::to_string(nx));
  if (ny < 4) throw std::invalid_argument("build_geometry: Ny must be >= 4, got " + std::to_string(ny));
  auto g = std::make_shared<ChannelGeometry>();
  g->nx = nx;
  g->ny = ny;
  g->lx = 2.0 * std::numbers::pi;
  g->height = 1.0;
  g->x.resize(nx);
  for (int i = 0; i < nx; ++i) g->x[i] = g->lx * i / nx;
  std::vector<double> s, ws;
  gll_nodes(ny, s, ws);
  g->y.resize(ny);
  g->wy.resize(ny);
  for (int j = 0; j < ny; ++j) {
    g->y[j] = 0.5 * (s[j] + 1.0);
    g->wy[j] = 0.5 * ws[j];
  }
  g->y.front() = 0.0;
  g->y.back() = 1.0;
  const double hx = g->lx / nx;
  g->wall_weights.assign(nx, hx);
  g->interior_weights.resize(g->size());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) g->interior_weights[g->index(i, j)] = hx * g->wy[j];
  g->dx = fourier_diff(nx);
  g->dy = poly_diff(g->y);
  g->y_exactness = 2 * ny - 3;
  return g;
}

double boundary_integral(const ChannelGeometry& geom, std::span<const double> g) {
  if (g.size() != 2 * static_cast<std::size_t>(geom.nx))
    throw std::invalid_argument("boundary_integral: expected 2*Nx samples");
  double s = 0.0;
  for (int i = 0; i < geom.nx; ++i) s += geom.wall_weights[i] * (g[i] + g[geom.nx + i]);
  return s;
}

std::pair<Vec2, Vec2> normal_tangent(Wall wall) {
  const Vec2 n = wall == Wall::bottom ? Vec2{0.0, -1.0} : Vec2{0.0, 1.0};
  return {n, Vec2{-n.y, n.x}};
}

}  // namespace acns
