#pragma once
// Independent reference quadrature for the tests: trapezoid in the periodic
// direction and Gauss-Legendre (Golub-Welsch) across the channel. Nothing
// here touches the library's own nodes or differentiation matrices.

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline void gauss_legendre01(int n, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x.resize(n), w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5 * (es.eigenvalues()[i] + 1.0);
    w[i] = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);  // weights on [-1,1] are 2 v0^2; halve for [0,1]
  }
}

// int_0^{2pi} int_0^1 f(x, y) dy dx
template <class F>
double area_integral(F&& f, int nxq = 96, int nyq = 48) {
  std::vector<double> y, wy;
  gauss_legendre01(nyq, y, wy);
  const double hx = 2 * std::numbers::pi / nxq;
  double s = 0;
  for (int i = 0; i < nxq; ++i)
    for (int j = 0; j < nyq; ++j) s += hx * wy[j] * f(i * hx, y[j]);
  return s;
}

// int over both walls of f(x, wall) with wall 0 bottom, 1 top
template <class F>
double wall_integral(F&& f, int nxq = 96) {
  const double hx = 2 * std::numbers::pi / nxq;
  double s = 0;
  for (int i = 0; i < nxq; ++i) s += hx * (f(i * hx, 0) + f(i * hx, 1));
  return s;
}

}  // namespace oracle
