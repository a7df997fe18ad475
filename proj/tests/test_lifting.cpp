#include <doctest.h>

#include <cmath>
#include <random>

#include "acns/lifting.hpp"

using namespace acns;

namespace {

double max_abs_diff(const VectorField& a, const VectorField& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.x.size(); ++i) m = std::max({m, std::abs(a.x[i] - b.x[i]), std::abs(a.y[i] - b.y[i])});
  return m;
}

double max_abs(const VectorField& a) {
  double m = 0;
  for (std::size_t i = 0; i < a.x.size(); ++i) m = std::max({m, std::abs(a.x[i]), std::abs(a.y[i])});
  return m;
}

}  // namespace

TEST_CASE("zero data gives the zero lift") {
  const auto g = build_geometry(12, 10);
  const std::vector<double> z(2 * g->nx, 0.0);
  const auto L = solve_stokes_lift(g, z, z, 1.0);
  CHECK(max_abs(L.a) == 0.0);
}

TEST_CASE("constant slip reproduces a uniform stream") {
  // b is the tangential stress in each wall's own frame: b = c on the bottom
  // (tau = +x) and b = -c on the top (tau = -x) describe the same (c, 0)
  const auto g = build_geometry(12, 10);
  const double c = 0.8;
  const std::vector<double> a(2 * g->nx, 0.0);
  std::vector<double> b(2 * g->nx, c);
  for (int i = 0; i < g->nx; ++i) b[g->nx + i] = -c;
  const auto L = solve_stokes_lift(g, a, b, 1.0);
  for (std::size_t r = 0; r < g->size(); ++r) {
    CHECK(std::abs(L.a.x[r] - c) < 1e-10);
    CHECK(std::abs(L.a.y[r]) < 1e-10);
  }
  const auto res = lift_residuals(L, a, b, 1.0);
  CHECK(res.momentum < 1e-10);
  CHECK(res.divergence < 1e-10);
  CHECK(res.normal < 1e-10);
  CHECK(res.slip < 1e-10);
}

TEST_CASE("literal b = c on both walls is a linear shear") {
  // with each wall's tangent, b = c on both walls gives u = c/3 - 2cy/3
  const auto g = build_geometry(8, 8);
  const double c = 1.2;
  const std::vector<double> a(2 * g->nx, 0.0), b(2 * g->nx, c);
  const auto L = solve_stokes_lift(g, a, b, 1.0);
  for (int j = 0; j < g->ny; ++j)
    for (int i = 0; i < g->nx; ++i) {
      const auto r = g->index(i, j);
      CHECK(std::abs(L.a.x[r] - (c / 3 - 2 * c * g->y[j] / 3)) < 1e-10);
      CHECK(std::abs(L.a.y[r]) < 1e-10);
    }
  CHECK(lift_residuals(L, a, b, 1.0).max() < 1e-10);
}

TEST_CASE("antisymmetric normal flux: small residuals and linear scaling") {
  const auto g = build_geometry(16, 14);
  const std::vector<double> b(2 * g->nx, 0.0);
  double n1 = 0;
  for (double eps : {1e-2, 1e-1, 1.0}) {
    std::vector<double> a(2 * g->nx);
    for (int i = 0; i < g->nx; ++i) a[i] = -eps * std::sin(g->x[i]), a[g->nx + i] = eps * std::sin(g->x[i]);
    const auto L = solve_stokes_lift(g, a, b, 1.0);
    CHECK(lift_residuals(L, a, b, 1.0).max() < 1e-8);
    const double n = std::sqrt(l2_inner(L.a, L.a));
    if (eps == 1e-2) n1 = n;
    CHECK(n == doctest::Approx(n1 * eps / 1e-2).epsilon(1e-10));
  }
}

TEST_CASE("lifting map is linear on random data pairs") {
  const auto g = build_geometry(16, 12);
  std::mt19937_64 eng(17);
  std::normal_distribution<double> N;
  auto random_data = [&](std::vector<double>& a, std::vector<double>& b) {
    a.assign(2 * g->nx, 0.0), b.assign(2 * g->nx, 0.0);
    for (int w = 0; w < 2; ++w)
      for (int k = 1; k <= 3; ++k) {
        const double ac = N(eng), as = N(eng), bc = N(eng), bs = N(eng);
        for (int i = 0; i < g->nx; ++i) {
          a[w * g->nx + i] += ac * std::cos(k * g->x[i]) + as * std::sin(k * g->x[i]);
          b[w * g->nx + i] += bc * std::cos(k * g->x[i]) + bs * std::sin(k * g->x[i]);
        }
      }
    const double b0 = N(eng);
    for (auto& x : b) x += b0;
  };
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> a1, b1, a2, b2;
    random_data(a1, b1);
    random_data(a2, b2);
    std::vector<double> a3(a1.size()), b3(b1.size());
    for (std::size_t i = 0; i < a1.size(); ++i) a3[i] = a1[i] + a2[i], b3[i] = b1[i] + b2[i];
    const auto L1 = solve_stokes_lift(g, a1, b1, 1.0), L2 = solve_stokes_lift(g, a2, b2, 1.0);
    const auto L3 = solve_stokes_lift(g, a3, b3, 1.0);
    VectorField sum = L1.a;
    for (std::size_t r = 0; r < sum.x.size(); ++r) sum.x[r] += L2.a.x[r], sum.y[r] += L2.a.y[r];
    CHECK(max_abs_diff(sum, L3.a) <= 1e-9 * max_abs(L3.a));
  }
}

TEST_CASE("incompatible normal flux is rejected") {
  const auto g = build_geometry(8, 8);
  const std::vector<double> a(2 * g->nx, 0.5), b(2 * g->nx, 0.0);
  CHECK_THROWS_AS(solve_stokes_lift(g, a, b, 1.0), std::invalid_argument);
  CHECK_THROWS(solve_stokes_lift(g, std::vector<double>(2 * g->nx, 0.0), b, 0.0));
}

TEST_CASE("lift_estimate_ratio: zero control rejected, constant slip ratio independent of c") {
  const auto g = build_geometry(12, 8);
  const ControlLayout L{1};
  CHECK_THROWS(lift_estimate_ratio(LiftingField(g, 1.0, BoundaryControl::zero(1, 1.0)), std::vector<double>{0.0}, 3.0));
  std::vector<double> ratios;
  for (double c : {0.1, 1.0, 7.0}) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(1, L.per_knot());
    m(0, L.b_0(0)) = c;
    m(0, L.b_0(1)) = -c;
    const LiftingField lf(g, 1.0, BoundaryControl(L, {0.0}, m));
    const auto est = lift_estimate_ratio(lf, std::vector<double>{0.0, 0.5}, 3.0);
    CHECK(std::isfinite(est.sup));
    CHECK(est.sup > 0);
    ratios.push_back(est.sup);
  }
  CHECK(ratios[1] == doctest::Approx(ratios[0]).epsilon(1e-10));
  CHECK(ratios[2] == doctest::Approx(ratios[0]).epsilon(1e-10));
}

TEST_CASE("lift_estimate_ratio bounded on random controls and stable under refinement") {
  const ControlLayout L{2};
  std::mt19937_64 eng(4);
  std::normal_distribution<double> N;
  double sup_c = 0, sup_f = 0;
  const auto gc = build_geometry(12, 10), gf = build_geometry(24, 20);
  for (int d = 0; d < 20; ++d) {
    Eigen::MatrixXd m(2, L.per_knot());
    for (int i = 0; i < m.size(); ++i) m(i) = N(eng);
    const BoundaryControl ctrl(L, {0.0, 1.0}, m);
    const std::vector<double> t{0.0, 0.25, 0.5, 0.75, 1.0};
    sup_c = std::max(sup_c, lift_estimate_ratio(LiftingField(gc, 1.0, ctrl), t, 3.0).sup);
    sup_f = std::max(sup_f, lift_estimate_ratio(LiftingField(gf, 1.0, ctrl), t, 3.0).sup);
  }
  CHECK(std::isfinite(sup_c));
  CHECK(sup_f / sup_c < 1.5);
  CHECK(sup_f / sup_c > 1 / 1.5);
}

TEST_CASE("time derivative of the lift agrees with finite differences at second order") {
  const auto g = build_geometry(12, 10);
  const ControlLayout L{1};
  Eigen::MatrixXd m(3, L.per_knot());
  std::mt19937_64 eng(8);
  std::normal_distribution<double> N;
  for (int i = 0; i < m.size(); ++i) m(i) = N(eng);
  const LiftingField lf(g, 1.0, BoundaryControl(L, {0.0, 0.5, 1.0}, m));
  const double t = 0.3;
  const auto ref = lf.at(t).dta;
  std::vector<double> err;
  for (double h : {0.02, 0.01, 0.005}) {
    const auto p = lf.at(t + h).a, q = lf.at(t - h).a;
    double e = 0;
    for (std::size_t r = 0; r < g->size(); ++r) {
      e = std::max(e, std::abs((p.x[r] - q.x[r]) / (2 * h) - ref.x[r]));
      e = std::max(e, std::abs((p.y[r] - q.y[r]) / (2 * h) - ref.y[r]));
    }
    err.push_back(e);
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.15));
  CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("lift fields are divergence free with the prescribed flux") {
  // hyperbolic profiles in y: collocation derivatives need a few more nodes
  const auto g = build_geometry(12, 16);
  const ControlLayout L{2};
  Eigen::MatrixXd m(1, L.per_knot());
  for (int i = 0; i < m.size(); ++i) m(i) = 0.1 * (i + 1);
  const BoundaryControl ctrl(L, {0.0}, m);
  const LiftingField lf(g, 1.0, ctrl);
  const auto s = lf.at(0.0);
  CHECK(div_residual(s.a) < 1e-9);
  const auto nt = normal_trace(s.a);
  const auto bs = ctrl.samples(*g, 0.0);
  for (int i = 0; i < 2 * g->nx; ++i) CHECK(std::abs(nt[i] - bs.a[i]) < 1e-8 * (1 + std::abs(bs.a[i])));
}
