#include <doctest.h>

#include <cmath>
#include <numbers>

#include "acns/domain.hpp"
#include "acns/spaces.hpp"

using namespace acns;
constexpr double pi = std::numbers::pi;

TEST_CASE("build_geometry area and wall weights") {
  const auto g = build_geometry(8, 8);
  double a = 0, w = 0;
  for (double x : g->interior_weights) a += x;
  for (double x : g->wall_weights) w += x;
  CHECK(std::abs(a - 2 * pi) <= 1e-12 * 2 * pi);
  CHECK(std::abs(w - 2 * pi) <= 1e-12 * 2 * pi);
  CHECK(g->area() == doctest::Approx(2 * pi));
  CHECK(g->y.front() == 0.0);
  CHECK(g->y.back() == 1.0);
}

TEST_CASE("build_geometry accepts the minimal grid and rejects bad sizes") {
  CHECK_NOTHROW(build_geometry(4, 4));
  CHECK_THROWS(build_geometry(7, 8));
  CHECK_THROWS(build_geometry(2, 8));
  CHECK_THROWS(build_geometry(8, 3));
}

TEST_CASE("quadrature is exact on resolved trigonometric polynomials") {
  const auto g = build_geometry(16, 10);
  // int cos^2(x) y^3 = pi / 4 ; int sin(3x) (1 + y^5) = 0 ; int cos(2x)^2 y^8 = pi / 9
  const auto f1 = sample(g, [](double x, double y) { return std::cos(x) * std::cos(x) * y * y * y; });
  const auto f2 = sample(g, [](double x, double y) { return std::sin(3 * x) * (1 + std::pow(y, 5)); });
  const auto f3 = sample(g, [](double x, double y) { return std::pow(std::cos(2 * x), 2) * std::pow(y, 8); });
  CHECK(std::abs(integrate(*g, f1.v) - pi / 4) <= 1e-12 * pi);
  CHECK(std::abs(integrate(*g, f2.v)) <= 1e-12);
  CHECK(std::abs(integrate(*g, f3.v) - pi / 9) <= 1e-12 * pi);
}

TEST_CASE("boundary_integral examples") {
  const auto g = build_geometry(8, 6);
  std::vector<double> one(2 * g->nx, 1.0), s(2 * g->nx), c2(2 * g->nx);
  for (int w = 0; w < 2; ++w)
    for (int i = 0; i < g->nx; ++i) {
      s[w * g->nx + i] = std::sin(g->x[i]);
      c2[w * g->nx + i] = std::cos(2 * g->x[i]);
    }
  CHECK(boundary_integral(*g, one) == doctest::Approx(4 * pi).epsilon(1e-13));
  CHECK(std::abs(boundary_integral(*g, s)) < 1e-13);
  CHECK(std::abs(boundary_integral(*g, c2)) < 1e-13);
  std::vector<double> bad(g->nx, 1.0);
  CHECK_THROWS(boundary_integral(*g, bad));
}

TEST_CASE("normal_tangent orientation") {
  const auto [nb, tb] = normal_tangent(Wall::bottom);
  const auto [nt, tt] = normal_tangent(Wall::top);
  CHECK(nb.x == 0.0);
  CHECK(nb.y == -1.0);
  CHECK(tb.x == 1.0);
  CHECK(tb.y == 0.0);
  CHECK(nt.x == 0.0);
  CHECK(nt.y == 1.0);
  CHECK(tt.x == -1.0);
  CHECK(tt.y == 0.0);
  for (const auto& [n, t] : {normal_tangent(Wall::bottom), normal_tangent(Wall::top)}) {
    CHECK(n.x * t.x + n.y * t.y == 0.0);
    CHECK(n.x * n.x + n.y * n.y == 1.0);
    CHECK(t.x * t.x + t.y * t.y == 1.0);
    CHECK(n.x * t.y - n.y * t.x == 1.0);  // det[n tau] = +1
  }
}

TEST_CASE("GLL nodes integrate polynomials up to the recorded degree") {
  const auto g = build_geometry(4, 9);
  CHECK(g->y_exactness == 2 * 9 - 3);
  for (int d = 0; d <= g->y_exactness; ++d) {
    double s = 0;
    for (int j = 0; j < g->ny; ++j) s += g->wy[j] * std::pow(g->y[j], d);
    CHECK(s == doctest::Approx(1.0 / (d + 1)).epsilon(1e-13));
  }
}
