#include <doctest.h>

#include <cmath>
#include <numbers>

#include "acns/ineq_audit.hpp"
#include "oracle.hpp"

using namespace acns;
constexpr double pi = std::numbers::pi;

TEST_CASE("constant fields are skipped by the mean-free inequalities") {
  const auto g = build_geometry(12, 8);
  const auto c = sample(g, [](double, double) { return 2.3; }, true);
  CHECK_FALSE(ratio_gn_mean_free(c).has_value());
  CHECK_FALSE(ratio_trace_interp(c).has_value());
  CHECK_FALSE(ratio_ladyzhenskaya(VectorField(g), 1.0).has_value());
  CHECK_FALSE(ratio_agmon(sample(g, [](double, double) { return 0.0; })).has_value());
}

TEST_CASE("mean_free removes the area mean") {
  const auto g = build_geometry(12, 10);
  const auto spec = build_spectrum(g, 1.0, 1.0);
  Rng rng(8);
  for (int k = 0; k < 10; ++k) {
    auto v = random_scalar(spec, 2.0, rng);
    for (auto& x : v.v) x += 3.0 * k;
    const auto w = mean_free(v);
    CHECK(std::abs(integrate(*g, w.v) / g->area()) < 1e-12 * (1 + 3.0 * k));
  }
}

TEST_CASE("Ladyzhenskaya ratio of (sin y, 0) against dense-quadrature norms") {
  const auto g = build_geometry(8, 20);
  const auto u = sample_vector(g, [](double, double y) { return std::pair{std::sin(y), 0.0}; });
  const double l4 = std::pow(oracle::area_integral([](double, double y) { return std::pow(std::sin(y), 4); }), 0.25);
  const double l2 = std::sqrt(oracle::area_integral([](double, double y) { return std::pow(std::sin(y), 2); }));
  // 2 |D u|^2 = cos^2 y, wall term alpha (u.tau)^2
  const double v2 = oracle::area_integral([](double, double y) { return std::pow(std::cos(y), 2); }) +
                    oracle::wall_integral([](double, int w) { return std::pow(std::sin(static_cast<double>(w)), 2); });
  const auto r = ratio_ladyzhenskaya(u, 1.0);
  REQUIRE(r.has_value());
  CHECK(*r == doctest::Approx(l4 / std::sqrt(l2 * std::sqrt(v2))).epsilon(1e-8));
}

TEST_CASE("gn_mean_free ratio of cos x against the closed form") {
  const auto g = build_geometry(16, 8);
  const auto v = sample(g, [](double x, double) { return std::cos(x); }, true);
  // |cos|_{L4}^4 = 3 pi / 4, |cos|^2 = pi, |grad cos|^2 = pi
  const auto r = ratio_gn_mean_free(v);
  REQUIRE(r.has_value());
  CHECK(*r == doctest::Approx(std::pow(0.75 * pi, 0.25) / std::sqrt(pi)).epsilon(1e-12));
}

TEST_CASE("Korn ratios over 100 random divergence-free fields") {
  const auto coarse = build_spectrum(build_geometry(16, 12), 1.0, 1.0);
  const auto fine = build_spectrum(build_geometry(32, 24), 1.0, 1.0);
  AuditSettings s;
  const auto r = audit(Inequality::korn, 100, 3, s, coarse, fine);
  CHECK(r.samples == 100);
  CHECK(r.finite);
  CHECK(r.min_ratio > 0);
  CHECK(r.min_ratio <= r.max_ratio);
  CHECK(std::isfinite(r.max_ratio));
  CHECK(r.trend == "stable");
}

TEST_CASE("every audited inequality stays bounded under refinement") {
  const auto coarse = build_spectrum(build_geometry(16, 12), 1.0, 1.0);
  const auto fine = build_spectrum(build_geometry(32, 24), 1.0, 1.0);
  for (auto q : all_inequalities()) {
    CAPTURE(to_string(q));
    const auto r = audit(q, 40, 17, AuditSettings{}, coarse, fine);
    CHECK(r.finite);
    CHECK(r.trend == "stable");
    CHECK(r.growth < AuditSettings{}.growth_tol);
    CHECK(inequality_from_string(to_string(q)) == q);
  }
  CHECK_THROWS(inequality_from_string("poincare"));
}

TEST_CASE("audit reproducibility") {
  const auto a = audit(Inequality::agmon, 10, 5), b = audit(Inequality::agmon, 10, 5);
  CHECK(a.max_ratio == b.max_ratio);
  CHECK(a.argmax == b.argmax);
}
