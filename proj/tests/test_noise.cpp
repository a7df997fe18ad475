#include <doctest.h>

#include <cmath>

#include "acns/ineq_audit.hpp"
#include "acns/noise.hpp"

using namespace acns;

namespace {

struct Fixture {
  GeometryPtr g = build_geometry(12, 10);
  Spectrum spec = build_spectrum(g, 1.0, 1.0);
  GalerkinBasis basis = galerkin_basis(spec, 24);
};

double dist2(const VectorField& a, const VectorField& b) {
  double s = 0;
  VectorField d = a;
  for (std::size_t i = 0; i < d.x.size(); ++i) d.x[i] -= b.x[i], d.y[i] -= b.y[i];
  s = l2_inner(d, d);
  return s;
}

}  // namespace

TEST_CASE("additive-only noise ignores the state") {
  Fixture f;
  const auto m = make_noise_model({{0.0, 5, 0, 0.3}, {0.0, 5, 2, -0.2}});
  Rng rng(1);
  const auto v = random_velocity(f.spec, 2.0, rng);
  const auto g1 = noise_apply(f.basis, m, v), g0 = noise_apply(f.basis, m, VectorField(f.g));
  REQUIRE(g1.size() == 2);
  for (int k = 0; k < 2; ++k) CHECK(dist2(g1[k], g0[k]) < 1e-26);
  CHECK(std::sqrt(l2_inner(g0[0], g0[0])) == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(div_residual(g1[0]) < 1e-10);
}

TEST_CASE("zero state and zero additive part give zero noise") {
  Fixture f;
  const auto m = make_noise_model({{0.5, 6, 0, 0.0}, {1.5, 10, 0, 0.0}});
  for (const auto& gk : noise_apply(f.basis, m, VectorField(f.g))) CHECK(l2_inner(gk, gk) == 0.0);
}

TEST_CASE("measured Lipschitz ratio does not exceed sigma^2") {
  Fixture f;
  const double sigma = 0.7;
  const auto m = make_noise_model({{sigma, 8, 1, 0.4}});
  Rng rng(2);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const auto v = random_velocity(f.spec, 1.5, rng), w = random_velocity(f.spec, 1.5, rng);
    const auto gv = noise_apply(f.basis, m, v), gw = noise_apply(f.basis, m, w);
    worst = std::max(worst, dist2(gv[0], gw[0]) / dist2(v, w));
  }
  CHECK(worst > 0);
  CHECK(worst <= sigma * sigma * (1 + 1e-10));
}

TEST_CASE("noise outputs are already divergence free and tangent to the walls") {
  Fixture f;
  const auto m = make_noise_model({{1.0, 24, 3, 0.2}});
  Rng rng(3);
  const auto v = random_velocity(f.spec, 2.0, rng);
  const auto g = noise_apply(f.basis, m, v)[0];
  CHECK(div_residual(g) < 1e-10);
  for (double t : normal_trace(g)) CHECK(std::abs(t) < 1e-10);
  const auto Pg = project_div_free(f.spec, g);
  CHECK(dist2(Pg, g) <= 1e-20 * (1 + l2_inner(g, g)));
}

TEST_CASE("declared K consistency") {
  CHECK_THROWS(make_noise_model({{2.0, 4, 0, 0.0}}, 3.0));
  CHECK_NOTHROW(make_noise_model({{2.0, 4, 0, 0.0}}, 4.0));
  const auto m = make_noise_model({{0.5, 4, 0, 0.1}, {0.25, 4, 0, 0.3}});
  CHECK(m.K == doctest::Approx(2 * 0.75 * 0.75));
  CHECK_THROWS(make_noise_model({{0.5, -1, 0, 0.0}}));
}

TEST_CASE("H1 audit with the declared K finds no violations") {
  Fixture f;
  const auto m = make_noise_model({{0.5, 10, 0, 0.1}, {0.2, 4, 1, 0.05}});
  const auto a = audit_h1(f.basis, m, 300, 99);
  CHECK(a.pairs == 300);
  CHECK(a.lipschitz_violations == 0);
  CHECK(a.growth_violations == 0);
  CHECK(a.max_lipschitz <= m.K);
  CHECK(a.max_growth <= m.K);
  // an understated K is caught
  const auto bad = make_noise_model({{0.5, 10, 0, 0.1}, {0.2, 4, 1, 0.05}}, 0.25);
  CHECK(audit_h1(f.basis, bad, 300, 99).lipschitz_violations > 0);
}

TEST_CASE("sample_wiener statistics, determinism and degenerate cases") {
  const double dt = 1e-3;
  Rng rng(2024);
  double s = 0, s2 = 0;
  const int N = 100000;
  for (int i = 0; i < N; ++i) {
    const double w = sample_wiener(dt, 1, rng)[0];
    s += w, s2 += w * w;
  }
  const double mean = s / N, var = s2 / N - mean * mean;
  CHECK(var >= 0.95 * dt);
  CHECK(var <= 1.05 * dt);
  CHECK(std::abs(mean) < 4 * std::sqrt(dt / N));

  Rng a(7), b(7);
  CHECK(sample_wiener(0.01, 5, a) == sample_wiener(0.01, 5, b));
  CHECK(sample_wiener(0.01, 0, a).empty());
  CHECK_THROWS(sample_wiener(0.0, 2, a));
  CHECK_THROWS(sample_wiener(-1.0, 2, a));
}

TEST_CASE("per-path seeds are distinct and reproducible") {
  CHECK(path_seed(1, 0) == path_seed(1, 0));
  CHECK(path_seed(1, 0) != path_seed(1, 1));
  CHECK(path_seed(1, 0) != path_seed(2, 0));
}

TEST_CASE("BrownianPath coarse increments are sums of fine ones") {
  const BrownianPath bp(5, 3, 1e-3, 64);
  std::vector<double> coarse, fine;
  for (long s = 0; s < 16; ++s) {
    bp.increment(s, 4, coarse);
    std::vector<double> sum(3, 0.0);
    for (long f = 4 * s; f < 4 * s + 4; ++f) {
      bp.increment(f, 1, fine);
      for (int k = 0; k < 3; ++k) sum[k] += fine[k];
    }
    for (int k = 0; k < 3; ++k) CHECK(coarse[k] == doctest::Approx(sum[k]).epsilon(1e-14));
  }
  CHECK_THROWS(bp.increment(16, 4, coarse));
}
