#include <doctest.h>

#include <cmath>
#include <random>

#include "acns/dynamics.hpp"
#include "acns/ineq_audit.hpp"
#include "oracle.hpp"

using namespace acns;

namespace {

std::shared_ptr<const GalerkinBasis> make_basis(const GeometryPtr& g, int n) {
  return std::make_shared<const GalerkinBasis>(galerkin_basis(build_spectrum(g, 1.0, 1.0), n));
}

// analytic test fields with derivatives: v, w, z, phi, mu
struct Fields {
  static double vx(double x, double y) { return std::sin(x) * y * y; }
  static double vy(double x, double y) { return std::cos(x) * y; }
  static double wx(double x, double y) { return std::cos(2 * x) * y; }
  static double wy(double x, double y) { return std::sin(x) * (1 - y); }
  static double wx_x(double x, double y) { return -2 * std::sin(2 * x) * y; }
  static double wx_y(double x, double) { return std::cos(2 * x); }
  static double wy_x(double x, double y) { return std::cos(x) * (1 - y); }
  static double wy_y(double x, double) { return -std::sin(x); }
  static double zx(double, double y) { return y * y * y; }
  static double zy(double x, double) { return std::sin(x); }
  static double phi(double x, double y) { return std::cos(x) * y * y + y; }
  static double phi_x(double x, double y) { return -std::sin(x) * y * y; }
  static double phi_y(double x, double y) { return 2 * std::cos(x) * y + 1; }
  static double mu(double x, double y) { return std::sin(2 * x) + y * y * y; }
};

GalerkinState zero_state(const GalerkinBasis& b) {
  return {0.0, Eigen::VectorXd::Zero(b.nv()), Eigen::VectorXd::Zero(b.np())};
}

}  // namespace

TEST_CASE("convect against a dense quadrature oracle") {
  const auto g = build_geometry(16, 12);
  using F = Fields;
  const auto v = sample_vector(g, [](double x, double y) { return std::pair{F::vx(x, y), F::vy(x, y)}; });
  const auto w = sample_vector(g, [](double x, double y) { return std::pair{F::wx(x, y), F::wy(x, y)}; });
  const auto z = sample_vector(g, [](double x, double y) { return std::pair{F::zx(x, y), F::zy(x, y)}; });
  const double ref = oracle::area_integral([](double x, double y) {
    return (F::vx(x, y) * F::wx_x(x, y) + F::vy(x, y) * F::wx_y(x, y)) * F::zx(x, y) +
           (F::vx(x, y) * F::wy_x(x, y) + F::vy(x, y) * F::wy_y(x, y)) * F::zy(x, y);
  });
  CHECK(convect(v, w, z) == doctest::Approx(ref).epsilon(1e-8));
  const VectorField zero(g);
  CHECK(convect(zero, zero, zero) == 0.0);
}

TEST_CASE("capillary against a dense quadrature oracle and its trivial zeros") {
  const auto g = build_geometry(16, 12);
  using F = Fields;
  const auto mu = sample(g, F::mu);
  const auto phi = sample(g, F::phi);
  const auto w = sample_vector(g, [](double x, double y) { return std::pair{F::wx(x, y), F::wy(x, y)}; });
  const double ref = oracle::area_integral([](double x, double y) {
    return F::mu(x, y) * (F::phi_x(x, y) * F::wx(x, y) + F::phi_y(x, y) * F::wy(x, y));
  });
  CHECK(capillary(mu, phi, w) == doctest::Approx(ref).epsilon(1e-8));
  CHECK(std::abs(capillary(mu, sample(g, [](double, double) { return 2.5; }), w)) < 1e-12);

  const auto b = make_basis(g, 30);
  const auto spec = build_spectrum(g, 1.0, 1.0);
  Rng rng(4);
  const auto p = random_scalar(spec, 2.0, rng);
  const auto c = sample(g, [](double, double) { return -1.7; });
  for (int i = 0; i < b->nv(); ++i) CHECK(std::abs(capillary(c, p, velocity_mode(*b, i))) < 1e-10);
}

TEST_CASE("advection/capillary duality for tangential velocities") {
  // (u.grad phi, mu) and (mu grad phi, u) are the same integral; the two terms
  // enter the phase and velocity equations with opposite signs
  const auto g = build_geometry(16, 12);
  const auto spec = build_spectrum(g, 1.0, 1.0);
  Rng rng(6);
  for (int t = 0; t < 5; ++t) {
    const auto u = random_velocity(spec, 2.0, rng);
    const auto phi = random_scalar(spec, 2.0, rng), mu = random_scalar(spec, 2.0, rng);
    const auto px = ddx(*g, phi.v), py = ddy(*g, phi.v);
    std::vector<double> adv(g->size());
    for (std::size_t r = 0; r < adv.size(); ++r) adv[r] = (u.x[r] * px[r] + u.y[r] * py[r]) * mu.v[r];
    const double lhs = integrate(*g, adv), rhs = capillary(mu, phi, u);
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("skew identity with a flux-carrying lift") {
  const auto g = build_geometry(16, 20);
  const auto b = make_basis(g, 40);
  const ControlLayout L{2};
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(1, L.per_knot());
  m(0, L.a_cos(0, 1)) = 0.4, m(0, L.a_sin(1, 2)) = -0.3, m(0, L.b_0(0)) = 0.2;
  const BoundaryControl ctrl(L, {0.0}, m);
  const LiftingField lf(g, 1.0, ctrl);
  const auto a = lf.at(0.0).a;
  const auto an = normal_trace(a);
  std::mt19937_64 eng(3);
  std::normal_distribution<double> N;
  for (int t = 0; t < 5; ++t) {
    Eigen::VectorXd c(b->nv());
    for (int i = 0; i < c.size(); ++i) c[i] = N(eng) / (1 + i);
    const auto u = reconstruct_velocity(*b, c);
    VectorField v = u;
    for (std::size_t r = 0; r < v.x.size(); ++r) v.x[r] += a.x[r], v.y[r] += a.y[r];
    const auto ut = tangential_trace(u);
    std::vector<double> f(2 * g->nx);
    for (int r = 0; r < 2 * g->nx; ++r) f[r] = 0.5 * an[r] * ut[r] * ut[r];
    const double rhs = boundary_integral(*g, f);
    CHECK(std::abs(rhs) > 1e-6);
    CHECK(std::abs(convect(v, u, u) - rhs) <= 1e-8 * std::abs(rhs));
    CHECK(std::abs(convect(u, u, u)) <= 1e-10 * l2_inner(u, u));
  }
}

TEST_CASE("boundary_forcing examples") {
  const auto g = build_geometry(12, 10);
  const auto b = make_basis(g, 30);
  CHECK(boundary_forcing(std::vector<double>(2 * g->nx, 0.0), *b).isZero(0.0));
  const auto c = boundary_forcing(std::vector<double>(2 * g->nx, 1.3), *b);
  for (const auto& m : b->modes)
    if (m.kind == ModeKind::velocity && m.k != 0) CHECK(std::abs(c[m.column]) < 1e-12);
  std::mt19937_64 eng(5);
  std::normal_distribution<double> N;
  std::vector<double> r(2 * g->nx);
  for (auto& x : r) x = N(eng);
  const auto f = boundary_forcing(r, *b);
  for (int i = 0; i < b->nv(); ++i) {
    const auto tt = tangential_trace(velocity_mode(*b, i));
    std::vector<double> h(2 * g->nx);
    for (int q = 0; q < 2 * g->nx; ++q) h[q] = r[q] * tt[q];
    CHECK(f[i] == doctest::Approx(boundary_integral(*g, h)).epsilon(1e-12).scale(1.0));
  }
  CHECK_THROWS(boundary_forcing(std::vector<double>(3, 0.0), *b));
}

TEST_CASE("em_step fixed points") {
  const auto g = build_geometry(12, 10);
  const auto b = make_basis(g, 24);
  const GalerkinSystem sys(b, PotentialSpec{}, nullptr, NoiseModel{});
  const StepOptions opt;
  const auto z = zero_state(*b);
  const auto z1 = sys.em_step(z, 1e-2, {}, opt);
  CHECK(z1.beta.isZero(0.0));
  CHECK(z1.chi.isZero(0.0));

  const auto one = sys.project_initial(VectorField(g, true), sample(g, [](double, double) { return 1.0; }, true));
  auto s = one;
  for (int k = 0; k < 20; ++k) s = sys.em_step(s, 1e-2, {}, opt);
  CHECK((s.chi - one.chi).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(s.beta.lpNorm<Eigen::Infinity>() < 1e-12);  // mu vanishes up to rounding
  CHECK(reconstruct_phase(*b, s.chi).v[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("linear single-mode step against the Ornstein-Uhlenbeck formula") {
  const auto g = build_geometry(12, 10);
  const auto b = make_basis(g, 24);
  const double h = 0.3;
  const GalerkinSystem sys(b, PotentialSpec{}, nullptr, make_noise_model({{0.0, 0, 0, h}}));
  StepOptions opt;
  opt.nonlinear = false;
  const double lam = b->lambda_v[0];
  auto st = zero_state(*b);
  st.beta[0] = 1.0;
  std::vector<double> err;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    const double z = 0.8;  // fixed standardized increment
    const double dW = z * std::sqrt(dt);
    const auto next = sys.em_step(st, dt, std::vector<double>{dW}, opt);
    const auto det = sys.em_step(st, dt, std::vector<double>{0.0}, opt);
    // drift part: the exact decay e^{-lambda dt}
    err.push_back(std::abs(det.beta[0] - std::exp(-lam * dt)));
    // noise enters additively through the resolvent of the linear part
    CHECK(next.beta[0] - det.beta[0] == doctest::Approx(h * dW / (1 + 0.5 * lam * dt)).epsilon(1e-12));
    // and agrees with the OU noise term h dW to O(dt^{3/2})
    CHECK(std::abs(next.beta[0] - (std::exp(-lam * dt) + h * dW)) <= 2 * lam * h * std::pow(dt, 1.5) + 2 * err.back());
    for (int i = 1; i < b->nv(); ++i) CHECK(next.beta[i] == 0.0);
  }
  CHECK(err[0] < 1e-2 * lam * 4e-3);
  CHECK(err[0] / err[1] > 4 * 0.9);  // at least second order per step
  CHECK(err[1] / err[2] > 4 * 0.9);
}

TEST_CASE("em_step input validation") {
  const auto g = build_geometry(12, 10);
  const auto b = make_basis(g, 16);
  const GalerkinSystem sys(b, PotentialSpec{}, nullptr, make_noise_model({{0.5, 4, 0, 0.0}}));
  const auto z = zero_state(*b);
  CHECK_THROWS(sys.em_step(z, 0.0, std::vector<double>{0.0}, StepOptions{}));
  CHECK_THROWS(sys.em_step(z, 1e-3, std::vector<double>{}, StepOptions{}));
  StepOptions bad;
  bad.implicitness = 0.2;
  CHECK_THROWS(sys.em_step(z, 1e-3, std::vector<double>{0.0}, bad));
}

TEST_CASE("simulate_path: T = 0, zero data, determinism, divergence-free states") {
  const auto g = build_geometry(12, 10);
  const auto b = make_basis(g, 16);
  const GalerkinSystem quiet(b, PotentialSpec{}, nullptr, NoiseModel{});
  PathSettings ps;
  ps.T = 0.0;
  ps.dt = 1e-3;
  const auto init = quiet.initial_state(0.8, 0.1, 0.2);
  const auto t0 = simulate_path(quiet, ps, init, 1);
  REQUIRE(t0.states.size() == 1);
  CHECK(t0.states[0].beta == init.beta);
  CHECK(t0.states[0].chi == init.chi);

  ps.T = 0.05;
  const auto tz = simulate_path(quiet, ps, zero_state(*b), 1);
  for (const auto& s : tz.states) {
    CHECK(s.beta.isZero(0.0));
    CHECK(s.chi.isZero(0.0));
  }
  CHECK(tz.states.back().t == doctest::Approx(0.05));

  const auto ctrl = BoundaryControl(ControlLayout{1}, {0.0, 0.05},
                                    Eigen::MatrixXd::Constant(2, ControlLayout{1}.per_knot(), 0.05));
  const GalerkinSystem noisy(b, PotentialSpec{}, std::make_shared<const LiftingField>(g, 1.0, ctrl),
                             make_noise_model({{0.5, 8, 0, 0.1}}));
  const auto p1 = simulate_path(noisy, ps, init, 77), p2 = simulate_path(noisy, ps, init, 77);
  const auto p3 = simulate_path(noisy, ps, init, 78);
  REQUIRE(p1.states.size() == p2.states.size());
  bool differs = false;
  for (std::size_t k = 0; k < p1.states.size(); ++k) {
    CHECK(p1.states[k].beta == p2.states[k].beta);
    CHECK(p1.states[k].chi == p2.states[k].chi);
    differs = differs || p1.states[k].beta != p3.states[k].beta;
    CHECK(div_residual(reconstruct_velocity(*b, p1.states[k].beta)) < 1e-10);
  }
  CHECK(differs);
  for (std::size_t k = 1; k < p1.states.size(); ++k) CHECK(p1.states[k].t > p1.states[k - 1].t);

  ps.dt = 3e-3;
  CHECK_THROWS(simulate_path(quiet, ps, init, 1));
}

TEST_CASE("ensembles are thread-count independent and report failures") {
  const auto g = build_geometry(12, 10);
  const auto b = make_basis(g, 16);
  const GalerkinSystem sys(b, PotentialSpec{}, nullptr, make_noise_model({{0.5, 8, 0, 0.1}}));
  PathSettings ps;
  ps.T = 0.02;
  ps.dt = 1e-3;
  const auto init = sys.initial_state(0.8, 0.1, 0.2);
  const auto r1 = run_ensemble(sys, ps, init, 5, 4, 1), r2 = run_ensemble(sys, ps, init, 5, 4, 2);
  REQUIRE(r1.paths.size() == 4);
  REQUIRE(r2.paths.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(r1.paths[i].states.back().beta == r2.paths[i].states.back().beta);

  auto wild = init;
  wild.chi.setConstant(1e80);
  const auto bad = run_ensemble(sys, ps, wild, 5, 3, 1);
  CHECK(bad.paths.empty());
  REQUIRE(bad.failures.size() == 3);
  for (const auto& f : bad.failures) CHECK(f.t > 0);
  CHECK_THROWS_AS(simulate_path(sys, ps, wild, 1), StepFailure);
}

TEST_CASE("Galerkin consistency: truncations agree better as n grows") {
  const auto g = build_geometry(16, 12);
  PathSettings ps;
  ps.T = 0.05;
  ps.dt = 1e-3;
  const auto small = make_basis(g, 8);
  // initial data in the span of the first modes of every basis below
  Eigen::VectorXd beta0 = Eigen::VectorXd::Zero(small->nv()), chi0 = Eigen::VectorXd::Zero(small->np());
  for (int i = 0; i < beta0.size(); ++i) beta0[i] = 0.5 / (1 + i);
  for (int i = 0; i < chi0.size(); ++i) chi0[i] = 0.4 / (1 + i);
  const auto u0 = reconstruct_velocity(*small, beta0);
  const auto p0 = reconstruct_phase(*small, chi0);
  auto endpoint = [&](int n) {
    const auto b = make_basis(g, n);
    const GalerkinSystem sys(b, PotentialSpec{}, nullptr, NoiseModel{});
    const auto tr = simulate_path(sys, ps, sys.project_initial(u0, p0), 1);
    return std::pair{reconstruct_velocity(*b, tr.states.back().beta), reconstruct_phase(*b, tr.states.back().chi)};
  };
  auto dist = [](const std::pair<VectorField, ScalarField>& a, const std::pair<VectorField, ScalarField>& c) {
    VectorField du = a.first;
    ScalarField dp = a.second;
    for (std::size_t r = 0; r < du.x.size(); ++r) du.x[r] -= c.first.x[r], du.y[r] -= c.first.y[r];
    for (std::size_t r = 0; r < dp.v.size(); ++r) dp.v[r] -= c.second.v[r];
    return std::sqrt(l2_inner(du, du) + l2_inner(dp, dp));
  };
  const auto e16 = endpoint(16), e32 = endpoint(32), e64 = endpoint(64);
  const double d1 = dist(e16, e64), d2 = dist(e32, e64);
  CHECK(d2 < d1);
  CHECK(d2 < 0.05 * std::sqrt(l2_inner(e64.first, e64.first) + l2_inner(e64.second, e64.second)));
}
