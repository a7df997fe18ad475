#include "acns/ineq_audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace acns {

namespace {

constexpr double kTiny = 1e-13;

std::optional<double> guarded(double lhs, double rhs, double scale) {
  if (!(rhs > kTiny * std::max(1.0, scale))) return std::nullopt;
  return lhs / rhs;
}

}  // namespace

std::string to_string(Inequality q) {
  switch (q) {
    case Inequality::ladyzhenskaya: return "ladyzhenskaya";
    case Inequality::gn_mean_free: return "gn_mean_free";
    case Inequality::trace_interp: return "trace_interp";
    case Inequality::korn: return "korn";
    case Inequality::agmon: return "agmon";
  }
  return "?";
}

Inequality inequality_from_string(const std::string& s) {
  for (auto q : all_inequalities())
    if (to_string(q) == s) return q;
  throw std::invalid_argument("unknown inequality: " + s);
}

std::vector<Inequality> all_inequalities() {
  return {Inequality::ladyzhenskaya, Inequality::gn_mean_free, Inequality::trace_interp, Inequality::korn,
          Inequality::agmon};
}

ScalarField mean_free(const ScalarField& v) {
  const auto& g = *v.geom;
  const double m = integrate(g, v.v) / g.area();
  ScalarField out = v;
  for (auto& x : out.v) x -= m;
  return out;
}

std::optional<double> ratio_ladyzhenskaya(const VectorField& u, double alpha) {
  const auto n = norms(u);
  const double v = std::sqrt(std::max(0.0, slip_inner(u, u, alpha)));
  return guarded(n.l4, std::sqrt(n.l2 * v), n.l4);
}

std::optional<double> ratio_gn_mean_free(const ScalarField& v) {
  const auto n = norms(v);
  const auto w = norms(mean_free(v));
  // constants: v - v_D vanishes and grad v is pure rounding, 0/0
  if (!(w.l2 > kTiny * std::max(1.0, n.l2))) return std::nullopt;
  return guarded(w.l4, std::sqrt(n.l2 * n.grad_l2), n.l2);
}

std::optional<double> ratio_trace_interp(const ScalarField& v) {
  const auto& g = *v.geom;
  const auto n = norms(v);
  const auto mf = mean_free(v);
  if (!(norms(mf).l2 > kTiny * std::max(1.0, n.l2))) return std::nullopt;
  const auto w = wall_values(mf);
  std::vector<double> q(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) q[i] = std::pow(w[i], 4);
  const double lhs = std::pow(boundary_integral(g, q), 0.25);
  return guarded(lhs, std::sqrt(n.l2 * n.grad_l2), n.l2);
}

std::optional<double> ratio_korn(const VectorField& u, double alpha) {
  const double v = std::sqrt(std::max(0.0, slip_inner(u, u, alpha)));
  return guarded(norms(u).h1, v, 0.0);
}

std::optional<double> ratio_agmon(const ScalarField& v) {
  const auto n = norms(v);
  return guarded(n.linf, std::sqrt(n.l2 * n.h2), n.linf);
}

VectorField random_velocity(const Spectrum& spec, double decay, Rng& rng) {
  const int m = spec.velocity_dim();
  Eigen::VectorXd c(m);
  for (int i = 0; i < m; ++i) c(i) = rng.normal() * std::pow(1.0 + spec.lambda_v[i], -0.5 * decay);
  VectorField u(spec.geom, true);
  Eigen::Map<Eigen::VectorXd>(u.x.data(), u.x.size()) = spec.vel.ux * c;
  Eigen::Map<Eigen::VectorXd>(u.y.data(), u.y.size()) = spec.vel.uy * c;
  return u;
}

ScalarField random_scalar(const Spectrum& spec, double decay, Rng& rng) {
  const int m = spec.phase_dim();
  Eigen::VectorXd c(m);
  // phase columns have |psi|^2 = 1/lambda; rescale to unit L2
  for (int i = 0; i < m; ++i)
    c(i) = rng.normal() * std::pow(1.0 + spec.lambda_p[i], -0.5 * decay) * std::sqrt(spec.lambda_p[i]);
  ScalarField f(spec.geom, true);
  Eigen::Map<Eigen::VectorXd>(f.v.data(), f.v.size()) = spec.phase.f * c;
  return f;
}

namespace {

struct Sweep {
  double max = 0, min = std::numeric_limits<double>::infinity();
  int argmax = -1, skipped = 0;
  bool finite = true;
};

Sweep sweep(Inequality q, int samples, std::uint64_t seed, const AuditSettings& s, const Spectrum& spec) {
  Rng rng(seed);
  Sweep r;
  for (int i = 0; i < samples; ++i) {
    std::optional<double> x;
    switch (q) {
      case Inequality::ladyzhenskaya: x = ratio_ladyzhenskaya(random_velocity(spec, s.decay, rng), s.alpha); break;
      case Inequality::korn: x = ratio_korn(random_velocity(spec, s.decay, rng), s.alpha); break;
      case Inequality::gn_mean_free: x = ratio_gn_mean_free(random_scalar(spec, s.decay, rng)); break;
      case Inequality::trace_interp: x = ratio_trace_interp(random_scalar(spec, s.decay, rng)); break;
      case Inequality::agmon: x = ratio_agmon(random_scalar(spec, s.decay, rng)); break;
    }
    if (!x) {
      ++r.skipped;
      continue;
    }
    if (!std::isfinite(*x)) r.finite = false;
    if (*x > r.max) r.max = *x, r.argmax = i;
    r.min = std::min(r.min, *x);
  }
  if (r.argmax < 0) r.min = 0.0;
  return r;
}

}  // namespace

RatioReport audit(Inequality q, int samples, std::uint64_t seed, const AuditSettings& s, const Spectrum& coarse,
                  const Spectrum& fine) {
  if (samples < 1) throw std::invalid_argument("audit: samples must be at least 1");
  const auto a = sweep(q, samples, seed, s, coarse);
  const auto b = sweep(q, samples, seed, s, fine);
  RatioReport r;
  r.name = to_string(q);
  r.samples = samples;
  r.skipped = a.skipped;
  r.max_ratio = a.max;
  r.min_ratio = a.min;
  r.argmax = a.argmax < 0 ? "none"
                          : "sample " + std::to_string(a.argmax) + " on " + std::to_string(coarse.geom->nx) + "x" +
                                std::to_string(coarse.geom->ny);
  r.max_ratio_fine = b.max;
  r.finite = a.finite && b.finite && std::isfinite(a.max) && std::isfinite(b.max);
  r.growth = a.max > 0 ? b.max / a.max : (b.max > 0 ? std::numeric_limits<double>::infinity() : 1.0);
  r.trend = (r.finite && r.growth <= s.growth_tol) ? "stable" : "growing";
  return r;
}

RatioReport audit(Inequality q, int samples, std::uint64_t seed, const AuditSettings& s) {
  const auto coarse = build_spectrum(build_geometry(s.nx, s.ny), s.alpha, s.theta);
  const auto fine = build_spectrum(build_geometry(2 * s.nx, 2 * s.ny), s.alpha, s.theta);
  return audit(q, samples, seed, s, coarse, fine);
}

}  // namespace acns
