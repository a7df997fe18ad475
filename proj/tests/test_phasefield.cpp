#include <doctest.h>

#include <cmath>
#include <numbers>

#include "acns/ineq_audit.hpp"
#include "acns/phasefield.hpp"

using namespace acns;
constexpr double pi = std::numbers::pi;

TEST_CASE("potential_eval examples") {
  const PotentialSpec s;
  const auto one = potential_eval(1.0, s);
  CHECK(one.F == 0.0);
  CHECK(one.f == 0.0);
  const auto zero = potential_eval(0.0, s);
  CHECK(zero.F == 1.0);
  CHECK(zero.f == 0.0);
  CHECK(zero.f_theta == 0.0);
  const auto two = potential_eval(2.0, s);
  CHECK(two.F == 9.0);
  CHECK(two.f == 24.0);
  CHECK(two.f_theta == 22.0);
}

TEST_CASE("potential_eval: f = F', F_theta = int_0^r f_theta, bounded below") {
  PotentialSpec s;
  s.delta = 0.5;
  s.xi = 2.0;
  double lo = 1e300;
  for (double r = -3.0; r <= 3.0; r += 0.37) {
    const double h = 1e-5;
    const auto v = potential_eval(r, s);
    const double dF = (potential_eval(r + h, s).F - potential_eval(r - h, s).F) / (2 * h);
    CHECK(dF == doctest::Approx(v.f).epsilon(1e-7).scale(1.0));
    // Simpson on 200 panels, exact for the cubic f_theta
    const int n = 200;
    double I = 0;
    for (int i = 0; i <= n; ++i) {
      const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
      I += w * potential_eval(r * i / n, s).f_theta;
    }
    I *= r / n / 3;
    CHECK(v.F_theta - potential_eval(0.0, s).F_theta == doctest::Approx(I).epsilon(1e-12).scale(1.0));
    lo = std::min(lo, v.F_theta);
  }
  CHECK(lo > -1.0);
}

TEST_CASE("growth bound") {
  CHECK(growth_bound_holds(PotentialSpec{}));
  PotentialSpec tight;
  tight.cf = 0.5;
  CHECK_FALSE(growth_bound_holds(tight));
}

TEST_CASE("potential spec validation") {
  PotentialSpec s;
  CHECK_NOTHROW(s.validate());
  s.theta = 0;
  CHECK_THROWS(s.validate());
  s = PotentialSpec{};
  s.delta = 2, s.xi = 1;
  CHECK_THROWS(s.validate());
}

TEST_CASE("chemical_potential examples") {
  const auto g = build_geometry(16, 10);
  const PotentialSpec s;
  const auto z = chemical_potential(sample(g, [](double, double) { return 0.0; }, true), s);
  for (double v : z.v) CHECK(v == 0.0);
  for (double c : {-1.3, 0.4, 2.0}) {
    const auto mu = chemical_potential(sample(g, [&](double, double) { return c; }, true), s);
    for (double v : mu.v) CHECK(v == doctest::Approx(4 * c * c * c - 4 * c).epsilon(1e-10).scale(1.0));
  }
  CHECK_THROWS(chemical_potential(sample(g, [](double, double) { return 1.0; }), s));
}

TEST_CASE("chemical_potential of 0.1 cos x against the closed form") {
  const auto g = build_geometry(16, 10);
  const auto phi = sample(g, [](double x, double) { return 0.1 * std::cos(x); }, true);
  const auto mu = chemical_potential(phi, PotentialSpec{});
  for (int j = 0; j < g->ny; ++j)
    for (int i = 0; i < g->nx; ++i) {
      const double p = 0.1 * std::cos(g->x[i]);
      const double exact = p + 4 * p * p * p - 4 * p;  // -lap phi + f(phi)
      const double v = mu.v[g->index(i, j)];
      CHECK(std::abs(v - exact) < 1e-10);
      CHECK(std::abs(v - 0.1 * std::cos(g->x[i]) * (1 - 4)) <= 0.004 + 1e-12);
    }
}

TEST_CASE("shift identity: A_theta phi + f_theta(phi) - (-lap phi + f(phi)) = (theta - delta/xi) phi") {
  const auto g = build_geometry(12, 10);
  const auto spec = build_spectrum(g, 1.0, 1.0);
  Rng rng(11);
  for (double theta : {1.0, 2.5}) {
    PotentialSpec s;
    s.theta = theta;
    const auto phi = random_scalar(spec, 2.0, rng);
    const auto mu = chemical_potential(phi, s);
    const auto ref = chemical_potential(phi, PotentialSpec{});  // theta = delta/xi = 1
    for (std::size_t i = 0; i < mu.v.size(); ++i)
      CHECK(std::abs(mu.v[i] - ref.v[i] - (theta - 1.0) * phi.v[i]) < 1e-10 * (1 + std::abs(mu.v[i])));
  }
}

TEST_CASE("variational consistency of mu with second-order finite differences") {
  const auto g = build_geometry(12, 12);
  const auto spec = build_spectrum(g, 1.0, 1.0);
  Rng rng(21);
  const PotentialSpec s;
  for (int trial = 0; trial < 5; ++trial) {
    const auto phi = random_scalar(spec, 2.0, rng), psi = random_scalar(spec, 2.0, rng);
    const double exact = l2_inner(chemical_potential(phi, s), psi);
    auto energy = [&](double e) {
      ScalarField q = phi;
      for (std::size_t i = 0; i < q.v.size(); ++i) q.v[i] += e * psi.v[i];
      return 0.5 * grad_inner(q, q) + free_energy(q);
    };
    std::vector<double> err;
    for (double e : {2e-2, 1e-2}) err.push_back(std::abs((energy(e) - energy(-e)) / (2 * e) - exact));
    CHECK(err[1] < 1e-3 * (1 + std::abs(exact)));
    if (err[0] > 1e-9) CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.05));
  }
}

TEST_CASE("energy_E examples and energy_tilde") {
  const auto g = build_geometry(8, 6);
  const VectorField u0(g);
  const auto one = sample(g, [](double, double) { return 1.0; }, true);
  const auto zero = sample(g, [](double, double) { return 0.0; }, true);
  CHECK(std::abs(energy_E(u0, one)) < 1e-14);
  CHECK(energy_E(u0, zero) == doctest::Approx(2 * pi).epsilon(1e-13));
  CHECK(energy_tilde(u0, zero) == doctest::Approx(4 * pi).epsilon(1e-13));
  const double c = 0.9;
  const auto u = sample_vector(g, [&](double, double) { return std::pair{c, 0.0}; });
  CHECK(energy_E(u, one) == doctest::Approx(2 * pi * c * c).epsilon(1e-13));
}
