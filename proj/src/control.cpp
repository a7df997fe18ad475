#include "acns/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace acns {

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return t;
}

double trapz(std::span<const double> t, std::span<const double> f) {
  double s = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) s += 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
  return s;
}

Eigen::VectorXd padded(const Eigen::VectorXd& v, Eigen::Index n) {
  if (v.size() == n) return v;
  if (v.size() == 0) return Eigen::VectorXd::Zero(n);
  throw std::invalid_argument("lift coefficient size mismatch");
}

}  // namespace

bool AdmissibleFamily::contains(std::span<const double> params, double tol) const {
  if (static_cast<int>(params.size()) != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    const double w = tol * std::max(1.0, hi[i] - lo[i]);
    if (!(params[i] >= lo[i] - w && params[i] <= hi[i] + w)) return false;
  }
  return true;
}

void AdmissibleFamily::validate() const {
  if (layout.kc < 1) throw std::invalid_argument("family: kc must be at least 1");
  if (knots.empty()) throw std::invalid_argument("family: no knots");
  if (lo.size() != hi.size() || static_cast<int>(lo.size()) != static_cast<int>(knots.size()) * layout.per_knot())
    throw std::invalid_argument("family: box size does not match knots x layout");
  for (int i = 0; i < dim(); ++i)
    if (!(lo[i] <= hi[i])) throw std::invalid_argument("family: empty box interval");
  if (!(C0 > 0)) throw std::invalid_argument("family: C0 must be positive");
  if (!(delta > 1)) throw std::invalid_argument("family: delta must exceed 1");
  if (!(p > 2)) throw std::invalid_argument("family: p must exceed 2");
  if (!(T > 0)) throw std::invalid_argument("family: T must be positive");
  if (quad_points < 2) throw std::invalid_argument("family: need at least 2 quadrature points");
}

AdmissibleFamily AdmissibleFamily::symmetric(ControlLayout layout, std::vector<double> knots, double bound, double T) {
  AdmissibleFamily f;
  f.layout = layout;
  f.knots = std::move(knots);
  const int d = static_cast<int>(f.knots.size()) * layout.per_knot();
  f.lo.assign(d, -bound);
  f.hi.assign(d, bound);
  f.T = T;
  return f;
}

BoundaryControl synthesize_control(std::span<const double> params, const AdmissibleFamily& family) {
  family.validate();
  if (static_cast<int>(params.size()) != family.dim())
    throw std::invalid_argument("synthesize_control: parameter count mismatch");
  if (!family.contains(params)) throw std::invalid_argument("synthesize_control: parameters outside the box");
  const int K = static_cast<int>(family.knots.size()), P = family.layout.per_knot();
  Eigen::MatrixXd c(K, P);
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < P; ++j) c(k, j) = params[static_cast<std::size_t>(k) * P + j];
  return BoundaryControl(family.layout, family.knots, c);
}

BoundaryControl synthesize_control(const CoefficientTable& table, const AdmissibleFamily& family) {
  for (double m : table.a_mean)
    if (m != 0.0) throw std::invalid_argument("synthesize_control: nonzero mean of a requested (compatibility)");
  return synthesize_control(table.params, family);
}

Admissibility admissibility_check(const BoundaryControl& ctrl, const ChannelGeometry& g, double C0, double delta,
                                  double T, double p, int quad_points) {
  if (!(C0 > 0) || !(T > 0) || quad_points < 2) throw std::invalid_argument("admissibility_check: bad arguments");
  const auto t = linspace(0.0, T, quad_points);
  std::vector<double> f(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double h = ctrl.hp_norm(g, t[k], p);
    f[k] = h * h;
  }
  Admissibility a;
  a.exponent = 4.0 * C0 * trapz(t, f);
  a.value = std::exp(a.exponent);
  a.margin = delta - a.value;
  a.pass = a.value < delta;
  return a;
}

double tight_scale(const BoundaryControl& ctrl, const ChannelGeometry& g, double C0, double delta, double T, double p,
                   int quad_points) {
  if (!(delta > 1)) throw std::invalid_argument("tight_scale: delta must exceed 1");
  const double target = std::log(delta);
  auto excess = [&](double s) {
    return admissibility_check(ctrl.scaled(s), g, C0, delta, T, p, quad_points).exponent - target;
  };
  if (admissibility_check(ctrl, g, C0, delta, T, p, quad_points).exponent == 0.0)
    return std::numeric_limits<double>::infinity();
  double lo = 0.0, hi = 1.0;
  while (excess(hi) < 0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double family_exponent_bound(const AdmissibleFamily& family, const ChannelGeometry& g) {
  family.validate();
  const auto t = linspace(0.0, family.T, family.quad_points);
  std::vector<double> sum(t.size(), 0.0);
  std::vector<double> e(family.dim(), 0.0);
  for (int i = 0; i < family.dim(); ++i) {
    const double c = std::max(std::abs(family.lo[i]), std::abs(family.hi[i]));
    if (c == 0.0) continue;
    e[i] = 1.0;
    AdmissibleFamily unit = family;
    std::fill(unit.lo.begin(), unit.lo.end(), -1.0);
    std::fill(unit.hi.begin(), unit.hi.end(), 1.0);
    const auto ctrl = synthesize_control(e, unit);
    e[i] = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) sum[k] += c * ctrl.hp_norm(g, t[k], family.p);
  }
  for (auto& s : sum) s *= s;
  return 4.0 * family.C0 * trapz(t, sum);
}

Targets zero_targets(const GalerkinSystem& sys, const std::vector<double>& t) {
  Targets tg;
  tg.t = t;
  for (std::size_t k = 0; k < t.size(); ++k) {
    tg.beta.push_back(Eigen::VectorXd::Zero(sys.basis().nv()));
    tg.chi.push_back(Eigen::VectorXd::Zero(sys.basis().np()));
    tg.lift.push_back(Eigen::VectorXd::Zero(sys.lift_dim()));
  }
  return tg;
}

Targets mean_targets(const std::vector<Trajectory>& paths) {
  if (paths.empty()) throw std::invalid_argument("mean_targets: no paths");
  Targets tg;
  const auto& p0 = paths.front();
  const double inv = 1.0 / static_cast<double>(paths.size());
  for (std::size_t k = 0; k < p0.states.size(); ++k) {
    tg.t.push_back(p0.states[k].t);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(p0.states[k].beta.size());
    Eigen::VectorXd c = Eigen::VectorXd::Zero(p0.states[k].chi.size());
    Eigen::VectorXd s = Eigen::VectorXd::Zero(p0.lift[k].size());
    for (const auto& p : paths) {
      if (p.states.size() != p0.states.size()) throw std::invalid_argument("mean_targets: grid mismatch");
      b += inv * p.states[k].beta;
      c += inv * p.states[k].chi;
      s += inv * padded(p.lift[k], s.size());
    }
    tg.beta.push_back(std::move(b));
    tg.chi.push_back(std::move(c));
    tg.lift.push_back(std::move(s));
  }
  return tg;
}

double control_penalty(const ChannelGeometry& g, const BoundaryControl& ctrl, std::span<const double> t,
                       double lambda1, double lambda2) {
  if (lambda1 < 0 || lambda2 < 0) throw std::invalid_argument("control_penalty: weights must be non-negative");
  if ((lambda1 == 0 && lambda2 == 0) || ctrl.coeffs().size() == 0) return 0.0;
  std::vector<double> f(t.size());
  std::vector<double> a2(2 * g.nx), b2(2 * g.nx);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto s = ctrl.samples(g, t[k]);
    for (int r = 0; r < 2 * g.nx; ++r) a2[r] = s.a[r] * s.a[r], b2[r] = s.b[r] * s.b[r];
    f[k] = 0.5 * (lambda1 * boundary_integral(g, a2) + lambda2 * boundary_integral(g, b2));
  }
  return trapz(t, f);
}

CostReport cost_J(const GalerkinSystem& sys, const std::vector<Trajectory>& paths, const Targets& targets,
                  const BoundaryControl& ctrl, const CostWeights& w) {
  if (paths.empty()) throw std::invalid_argument("cost_J: empty ensemble");
  const auto& b = sys.basis();
  const Eigen::Index J = sys.lift_dim();
  CostReport rep;
  double track = 0.0;
  for (const auto& p : paths) {
    if (p.states.size() != targets.t.size()) throw std::invalid_argument("cost_J: grid mismatch");
    std::vector<double> t(p.states.size()), f(p.states.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
      t[k] = p.states[k].t;
      if (std::abs(t[k] - targets.t[k]) > 1e-12) throw std::invalid_argument("cost_J: grid mismatch");
      const Eigen::VectorXd db = p.states[k].beta - targets.beta[k];
      const Eigen::VectorXd dc = p.states[k].chi - targets.chi[k];
      double v2 = 0.0, f2 = 0.0;
      if (w.norm == TrackingNorm::graded) {
        v2 = db.cwiseAbs2().dot(b.lambda_v);
        f2 = dc.squaredNorm();  // a_theta form
      } else {
        v2 = db.squaredNorm();
        f2 = dc.cwiseAbs2().cwiseQuotient(b.lambda_p).sum();
      }
      if (J > 0) {
        const Eigen::VectorXd ds = padded(p.lift[k], J) - padded(targets.lift[k], J);
        if (w.norm == TrackingNorm::graded)
          v2 += 2.0 * db.dot(sys.lift_slip_proj() * ds) + ds.dot(sys.lift_slip() * ds);
        else
          v2 += 2.0 * db.dot(sys.lift_proj() * ds) + ds.dot(sys.lift_l2() * ds);
      }
      f[k] = 0.5 * (v2 + f2);
    }
    rep.per_path.push_back(trapz(t, f));
    track += rep.per_path.back() / paths.size();
  }
  std::vector<double> tt(targets.t);
  rep.penalty = control_penalty(*b.geom, ctrl, tt, w.lambda1, w.lambda2);
  for (auto& x : rep.per_path) x += rep.penalty;
  rep.tracking = track;
  rep.ci = mean_ci(rep.per_path);
  rep.J = rep.ci.mean;
  return rep;
}

std::vector<std::vector<double>> latin_hypercube(int points, int dim, Rng& rng, long* cursor) {
  std::vector<std::vector<double>> x(points, std::vector<double>(dim));
  long draws = 0;
  std::vector<int> perm(points);
  for (int d = 0; d < dim; ++d) {
    for (int i = 0; i < points; ++i) perm[i] = i;
    for (int i = points - 1; i > 0; --i) {  // Fisher-Yates
      const int j = std::min(i, static_cast<int>(rng.uniform() * (i + 1)));
      ++draws;
      std::swap(perm[i], perm[j]);
    }
    for (int i = 0; i < points; ++i) {
      x[i][d] = (perm[i] + rng.uniform()) / points;
      ++draws;
    }
  }
  if (cursor) *cursor += draws;
  return x;
}

OptimizerRecord optimize(const AdmissibleFamily& family, const ChannelGeometry& g, const Objective& objective,
                         const OptimizerConfig& cfg, const OptimizerRecord* resume, const Progress& progress) {
  family.validate();
  if (cfg.budget < 1) throw std::invalid_argument("optimize: budget must be at least 1");
  const int d = family.dim();
  OptimizerRecord rec;
  rec.best_J = std::numeric_limits<double>::infinity();
  Rng rng(cfg.seed);

  auto evaluate = [&](const std::vector<double>& x) -> std::optional<double> {
    if (static_cast<int>(rec.history.size()) >= cfg.budget) return std::nullopt;
    const std::size_t idx = rec.history.size();
    Evaluation ev;
    if (resume && idx < resume->history.size()) {
      ev = resume->history[idx];
      for (int i = 0; i < d; ++i)
        if (ev.params.size() != x.size() || ev.params[i] != x[i])
          throw std::invalid_argument("optimize: checkpoint does not match this configuration");
    } else {
      ev.params = x;
      const auto ctrl = synthesize_control(x, family);
      ev.admissible = admissibility_check(ctrl, g, family.C0, family.delta, family.T, family.p, family.quad_points).pass;
      if (ev.admissible) {
        const auto c = objective(ctrl);
        ev.J = c.J;
        ev.se = c.ci.se;
      } else {
        ev.J = std::numeric_limits<double>::infinity();
      }
    }
    if (ev.admissible && ev.J < rec.best_J) {  // strict: lowest index wins ties
      rec.best_J = ev.J;
      rec.best_params = ev.params;
      rec.best_index = static_cast<int>(idx);
    }
    ev.best_so_far = rec.best_J;
    rec.history.push_back(ev);
    if (progress) progress(rec);
    return ev.J;
  };

  std::vector<double> width(d);
  for (int i = 0; i < d; ++i) width[i] = family.hi[i] - family.lo[i];
  auto to_box = [&](const std::vector<double>& u) {
    std::vector<double> x(d);
    for (int i = 0; i < d; ++i) x[i] = family.lo[i] + u[i] * width[i];
    return x;
  };

  std::vector<std::vector<double>> seeds;
  {
    std::vector<double> mid(d);
    for (int i = 0; i < d; ++i) mid[i] = 0.5 * (family.lo[i] + family.hi[i]);
    seeds.push_back(mid);
  }
  std::size_t next_seed = 0;
  bool done = false;
  std::vector<double> step(d);

  // one sweep over all coordinates from (x, fx), keeping every improvement
  auto explore = [&](std::vector<double> x, double fx) -> std::pair<std::vector<double>, double> {
    for (int i = 0; i < d && !done; ++i) {
      if (width[i] == 0.0) continue;
      for (double sgn : {1.0, -1.0}) {
        std::vector<double> y = x;
        y[i] = std::clamp(x[i] + sgn * step[i], family.lo[i], family.hi[i]);
        if (y[i] == x[i]) continue;
        const auto fy = evaluate(y);
        if (!fy) {
          done = true;
          break;
        }
        if (*fy < fx) {
          x = std::move(y);
          fx = *fy;
          break;
        }
      }
    }
    return {x, fx};
  };

  while (!done) {
    if (next_seed == seeds.size())
      for (auto& u : latin_hypercube(std::max(1, cfg.lhs_seeds), d, rng, &rec.rng_cursor)) seeds.push_back(to_box(u));
    std::vector<double> x = seeds[next_seed++];
    const auto f0 = evaluate(x);
    if (!f0) break;
    double fx = *f0;
    for (int i = 0; i < d; ++i) step[i] = cfg.step0 * width[i];
    // Hooke-Jeeves: exploratory sweeps, pattern moves along successful
    // displacements, step halving when a sweep finds nothing
    while (!done) {
      auto [y, fy] = explore(x, fx);
      if (done) break;
      if (fy < fx) {
        while (!done) {
          std::vector<double> p(d);
          for (int i = 0; i < d; ++i) p[i] = std::clamp(2 * y[i] - x[i], family.lo[i], family.hi[i]);
          x = y, fx = fy;
          if (p == x) break;
          const auto fp = evaluate(p);
          if (!fp) {
            done = true;
            break;
          }
          auto [q, fq] = explore(p, *fp);
          if (!(fq < fx)) break;
          y = std::move(q), fy = fq;
        }
        continue;
      }
      double rel = 0.0;
      for (int i = 0; i < d; ++i) {
        step[i] *= 0.5;
        if (width[i] > 0) rel = std::max(rel, step[i] / width[i]);
      }
      if (rel < cfg.min_step) break;
    }
  }
  if (rec.best_index < 0) throw std::runtime_error("optimize: no admissible candidate within budget (box violates the budget)");
  return rec;
}

}  // namespace acns
