#include "acns/boundary_control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "acns/spaces.hpp"

namespace acns {

BoundarySamples layout_basis_samples(const ChannelGeometry& g, const ControlLayout& L, int j) {
  BoundarySamples s{std::vector<double>(2 * g.nx, 0.0), std::vector<double>(2 * g.nx, 0.0)};
  const int wall = j / L.per_wall();
  const int r = j % L.per_wall();
  double* dst = nullptr;
  int k = 0;
  bool sine = false;
  if (r < 2 * L.kc) {
    dst = s.a.data();
    k = r % L.kc + 1;
    sine = r >= L.kc;
  } else {
    dst = s.b.data();
    const int q = r - 2 * L.kc;
    if (q == 0) {
      k = 0;
    } else {
      k = (q - 1) % L.kc + 1;
      sine = q > L.kc;
    }
  }
  for (int i = 0; i < g.nx; ++i) {
    const double x = g.x[i];
    dst[wall * g.nx + i] = k == 0 ? 1.0 : (sine ? std::sin(k * x) : std::cos(k * x));
  }
  return s;
}

BoundarySamples combine_samples(const ChannelGeometry& g, const ControlLayout& L, const Eigen::VectorXd& s) {
  BoundarySamples out{std::vector<double>(2 * g.nx, 0.0), std::vector<double>(2 * g.nx, 0.0)};
  for (int j = 0; j < L.per_knot(); ++j) {
    if (s(j) == 0.0) continue;
    const auto u = layout_basis_samples(g, L, j);
    for (int i = 0; i < 2 * g.nx; ++i) {
      out.a[i] += s(j) * u.a[i];
      out.b[i] += s(j) * u.b[i];
    }
  }
  return out;
}

BoundaryControl::BoundaryControl(ControlLayout layout, std::vector<double> knots, Eigen::MatrixXd coeffs)
    : layout_(layout), knots_(std::move(knots)), coeffs_(std::move(coeffs)) {
  if (layout_.kc < 1) throw std::invalid_argument("control: kc must be >= 1");
  if (knots_.empty()) throw std::invalid_argument("control: need at least one knot");
  if (coeffs_.rows() != static_cast<Eigen::Index>(knots_.size()) || coeffs_.cols() != layout_.per_knot())
    throw std::invalid_argument("control: coefficient table has wrong shape");
  for (std::size_t i = 1; i < knots_.size(); ++i)
    if (!(knots_[i] > knots_[i - 1])) throw std::invalid_argument("control: knots must increase");
  if (!coeffs_.allFinite()) throw std::invalid_argument("control: non-finite coefficient");
  const auto L = static_cast<Eigen::Index>(knots_.size());
  second_ = Eigen::MatrixXd::Zero(L, coeffs_.cols());
  if (L >= 3) {
    // natural spline: tridiagonal system for interior second derivatives
    const Eigen::Index m = L - 2;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd rhs(m, coeffs_.cols());
    for (Eigen::Index i = 1; i <= m; ++i) {
      const double h0 = knots_[i] - knots_[i - 1], h1 = knots_[i + 1] - knots_[i];
      A(i - 1, i - 1) = (h0 + h1) / 3.0;
      if (i > 1) A(i - 1, i - 2) = h0 / 6.0;
      if (i < m) A(i - 1, i) = h1 / 6.0;
      rhs.row(i - 1) = (coeffs_.row(i + 1) - coeffs_.row(i)) / h1 - (coeffs_.row(i) - coeffs_.row(i - 1)) / h0;
    }
    second_.middleRows(1, m) = A.partialPivLu().solve(rhs);
  }
}

BoundaryControl BoundaryControl::zero(int kc, double T) {
  ControlLayout L{kc};
  return BoundaryControl(L, {0.0, std::max(T, 1e-12)}, Eigen::MatrixXd::Zero(2, L.per_knot()));
}

void BoundaryControl::eval(double t, Eigen::VectorXd& s, Eigen::VectorXd& ds) const {
  const auto L = static_cast<Eigen::Index>(knots_.size());
  ds = Eigen::VectorXd::Zero(coeffs_.cols());
  if (L == 1) {
    s = coeffs_.row(0).transpose();
    return;
  }
  if (t <= knots_.front()) {
    s = coeffs_.row(0).transpose();
    if (t == knots_.front()) {
      const double h = knots_[1] - knots_[0];
      ds = ((coeffs_.row(1) - coeffs_.row(0)) / h - h * (2.0 * second_.row(0) + second_.row(1)) / 6.0).transpose();
    }
    return;
  }
  if (t >= knots_.back()) {
    s = coeffs_.row(L - 1).transpose();
    if (t == knots_.back()) {
      const double h = knots_[L - 1] - knots_[L - 2];
      ds = ((coeffs_.row(L - 1) - coeffs_.row(L - 2)) / h +
            h * (second_.row(L - 2) + 2.0 * second_.row(L - 1)) / 6.0)
               .transpose();
    }
    return;
  }
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const auto i = static_cast<Eigen::Index>(it - knots_.begin()) - 1;
  const double h = knots_[i + 1] - knots_[i];
  const double A = (knots_[i + 1] - t) / h, B = (t - knots_[i]) / h;
  const auto y0 = coeffs_.row(i), y1 = coeffs_.row(i + 1);
  const auto m0 = second_.row(i), m1 = second_.row(i + 1);
  s = (A * y0 + B * y1 + ((A * A * A - A) * m0 + (B * B * B - B) * m1) * (h * h / 6.0)).transpose();
  ds = ((y1 - y0) / h - (3.0 * A * A - 1.0) * h / 6.0 * m0 + (3.0 * B * B - 1.0) * h / 6.0 * m1).transpose();
}

BoundarySamples BoundaryControl::samples(const ChannelGeometry& g, double t) const {
  Eigen::VectorXd s, ds;
  eval(t, s, ds);
  return combine_samples(g, layout_, s);
}

BoundarySamples BoundaryControl::dt_samples(const ChannelGeometry& g, double t) const {
  Eigen::VectorXd s, ds;
  eval(t, s, ds);
  return combine_samples(g, layout_, ds);
}

double BoundaryControl::hp_norm(const ChannelGeometry& g, double t, double p) const {
  Eigen::VectorXd s, ds;
  eval(t, s, ds);
  const auto v = combine_samples(g, layout_, s);
  const auto d = combine_samples(g, layout_, ds);
  return hp_gamma_norm(g, v.a, v.b, d.a, d.b, p);
}

BoundaryControl BoundaryControl::scaled(double factor) const {
  return BoundaryControl(layout_, knots_, coeffs_ * factor);
}

}  // namespace acns
