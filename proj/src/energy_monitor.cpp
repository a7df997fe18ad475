#include "acns/energy_monitor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace acns {

namespace {

constexpr double kZ95 = 1.959963984540054;

double trapz(std::span<const double> t, std::span<const double> f) {
  double s = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) s += 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
  return s;
}

std::vector<double> times_of(const EnergyTrace& tr) {
  std::vector<double> t(tr.rec.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = tr.rec[k].t;
  return t;
}

EstimateReport ratio_report(std::string name, std::vector<double> L, std::vector<double> R) {
  EstimateReport rep;
  rep.name = std::move(name);
  rep.paths = static_cast<int>(L.size());
  rep.lhs = mean_ci(L);
  rep.rhs = mean_ci(R);
  rep.finite = std::isfinite(rep.lhs.mean) && std::isfinite(rep.rhs.mean) && rep.rhs.mean > 0;
  if (rep.finite) {
    rep.C_hat = rep.lhs.mean / rep.rhs.mean;
    // delta method on z_i = L_i - C R_i
    std::vector<double> z(L.size());
    for (std::size_t i = 0; i < L.size(); ++i) z[i] = L[i] - rep.C_hat * R[i];
    const double se = mean_ci(z).se / rep.rhs.mean;
    rep.C_lo = rep.C_hat - kZ95 * se;
    rep.C_hi = rep.C_hat + kZ95 * se;
    rep.finite = std::isfinite(rep.C_hat) && std::isfinite(se);
  }
  rep.lhs_path = std::move(L);
  rep.rhs_path = std::move(R);
  return rep;
}

void check_ensemble(const std::vector<EnergyTrace>& ens, std::span<const double> E0) {
  if (ens.empty()) throw std::invalid_argument("estimate check: empty ensemble");
  if (ens.size() < 2) throw std::invalid_argument("estimate check: need at least 2 paths");
  if (E0.size() != ens.size()) throw std::invalid_argument("estimate check: one E0 per path required");
  for (const auto& tr : ens)
    if (tr.rec.empty()) throw std::invalid_argument("estimate check: empty trace");
}

std::vector<double> first_energies(const std::vector<EnergyTrace>& ens) {
  std::vector<double> e;
  for (const auto& tr : ens) e.push_back(tr.rec.empty() ? 0.0 : tr.rec.front().E);
  return e;
}

}  // namespace

std::vector<double> weight_G(std::span<const double> t, std::span<const double> ftilde, double C0) {
  if (!(C0 > 0)) throw std::invalid_argument("weight_G: C0 must be positive");
  if (t.size() != ftilde.size()) throw std::invalid_argument("weight_G: size mismatch");
  std::vector<double> G(t.size());
  double I = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k > 0) I += 0.5 * (t[k] - t[k - 1]) * (ftilde[k] + ftilde[k - 1]);
    G[k] = std::exp(-C0 * (t[k] - t[0]) - C0 * I);
  }
  return G;
}

MeanCI mean_ci(std::span<const double> x) {
  MeanCI r;
  if (x.empty()) throw std::invalid_argument("mean_ci: no samples");
  double s = 0.0;
  for (double v : x) s += v;
  r.mean = s / x.size();
  if (x.size() > 1) {
    double q = 0.0;
    for (double v : x) q += (v - r.mean) * (v - r.mean);
    r.se = std::sqrt(q / (x.size() - 1) / x.size());
  }
  r.lo = r.mean - kZ95 * r.se;
  r.hi = r.mean + kZ95 * r.se;
  return r;
}

EstimateReport estimate_check_L41(const std::vector<EnergyTrace>& ens, std::span<const double> E0) {
  check_ensemble(ens, E0);
  std::vector<double> L, R;
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const auto& rec = ens[i].rec;
    const auto t = times_of(ens[i]);
    std::vector<double> gv(rec.size()), gl(rec.size());
    double sup = 0.0;
    for (std::size_t k = 0; k < rec.size(); ++k) {
      const double g2 = rec[k].G * rec[k].G;
      sup = std::max(sup, g2 * rec[k].Y2);
      gv[k] = g2 * rec[k].V2;
      gl[k] = g2 * rec[k].Lambda;
    }
    L.push_back(sup + trapz(t, gv));
    R.push_back(E0[i] + trapz(t, gl));
  }
  return ratio_report("second_moment", std::move(L), std::move(R));
}

EstimateReport estimate_check_L42(const std::vector<EnergyTrace>& ens, std::span<const double> E0) {
  check_ensemble(ens, E0);
  std::vector<double> L, R, L2;
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const auto& rec = ens[i].rec;
    const auto t = times_of(ens[i]);
    std::vector<double> gv(rec.size()), gb(rec.size());
    double sup2 = 0.0, sup4 = 0.0;
    for (std::size_t k = 0; k < rec.size(); ++k) {
      const double g2 = rec[k].G * rec[k].G;
      sup2 = std::max(sup2, g2 * rec[k].Y2);
      sup4 = std::max(sup4, g2 * g2 * rec[k].Y2 * rec[k].Y2);
      gv[k] = g2 * rec[k].V2;
      gb[k] = g2 * g2 * rec[k].B;
    }
    const double iv = trapz(t, gv);
    L.push_back(sup4 + iv * iv);
    R.push_back(E0[i] * E0[i] + trapz(t, gb));
    L2.push_back(sup2 + iv);
  }
  // (x + y)^2 <= 2 (x^2 + y^2), pathwise and after averaging (Jensen)
  int viol = 0;
  double m2 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < L.size(); ++i) {
    if (L2[i] * L2[i] > 2.0 * L[i] * (1.0 + 1e-12) + 1e-300) ++viol;
    m2 += L2[i] / L.size();
    m4 += L[i] / L.size();
  }
  if (m2 * m2 > 2.0 * m4 * (1.0 + 1e-12) + 1e-300) ++viol;
  auto rep = ratio_report("fourth_moment", std::move(L), std::move(R));
  rep.jensen_violations = viol;
  return rep;
}

EstimateReport estimate_check_L41(const std::vector<EnergyTrace>& ens) {
  const auto e = first_energies(ens);
  return estimate_check_L41(ens, e);
}
EstimateReport estimate_check_L42(const std::vector<EnergyTrace>& ens) {
  const auto e = first_energies(ens);
  return estimate_check_L42(ens, e);
}

RefinementReport refinement_stability(const std::vector<EstimateReport>& levels, double factor) {
  RefinementReport r;
  if (levels.empty()) throw std::invalid_argument("refinement_stability: no levels");
  bool ok = true;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& l : levels) {
    r.C.push_back(l.C_hat);
    if (!l.finite || !(l.C_hat > 0)) ok = false;
    lo = std::min(lo, l.C_hat);
    hi = std::max(hi, l.C_hat);
  }
  r.spread = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
  r.pass = ok && r.spread < factor;
  return r;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
  double mx = 0, my = 0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) mx += std::log(x[i]) / n, my += std::log(y[i]) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]) - mx;
    sxy += a * (std::log(y[i]) - my);
    sxx += a * a;
  }
  return sxy / sxx;
}

DissipationReport dissipation_study(const GalerkinSystem& sys, const GalerkinState& init, double T,
                                    std::span<const double> dts, StepOptions opt) {
  DissipationReport rep;
  for (double dt : dts) {
    PathSettings ps{T, dt, opt};
    const auto tr = simulate_path(sys, ps, init, std::uint64_t{0});
    double mx = 0.0;
    for (const auto& r : tr.trace.rec) mx = std::max(mx, std::abs(r.residual));
    rep.dt.push_back(dt);
    rep.residual.push_back(mx);
    rep.E0 = tr.trace.rec.front().Etilde;
  }
  if (rep.dt.size() >= 2) rep.slope = loglog_slope(rep.dt, rep.residual);
  return rep;
}

namespace {

void check_pair(const GalerkinSystem& A, const Trajectory& ta, const GalerkinSystem& B, const Trajectory& tb) {
  if (A.basis().nv() != B.basis().nv() || A.basis().np() != B.basis().np() ||
      A.basis().geom->nx != B.basis().geom->nx || A.basis().geom->ny != B.basis().geom->ny)
    throw std::invalid_argument("stability_distance: mismatched grids");
  if (ta.states.size() != tb.states.size()) throw std::invalid_argument("stability_distance: mismatched time grids");
  for (std::size_t k = 0; k < ta.states.size(); ++k)
    if (std::abs(ta.states[k].t - tb.states[k].t) > 1e-12) throw std::invalid_argument("stability_distance: mismatched time grids");
  if (A.lift_dim() && B.lift_dim() && A.lift_dim() != B.lift_dim())
    throw std::invalid_argument("stability_distance: control layouts differ");
}

Eigen::VectorXd lift_coeff(const Trajectory& t, std::size_t k, int J) {
  if (J == 0) return Eigen::VectorXd();
  const auto& s = t.lift[k];
  return s.size() == J ? s : Eigen::VectorXd(Eigen::VectorXd::Zero(J));
}

}  // namespace

std::vector<double> stability_ftilde(const GalerkinSystem& A, const Trajectory& ta, const GalerkinSystem& B,
                                     const Trajectory& tb, double C) {
  check_pair(A, ta, B, tb);
  std::vector<double> f(ta.states.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const auto& r1 = ta.trace.rec[k];
    const auto& r2 = tb.trace.rec[k];
    const double Y = std::max(r1.hp * r1.hp, r2.hp * r2.hp);
    const double l4 = r1.grad_phi_l4 * r1.grad_phi_l4;
    f[k] = C * (1.0 + l4 * l4 + r2.mu2 * r2.mu2 + r2.mu2 + r2.u_slip * r2.u_slip + Y * Y + r1.grad_phi2 * r1.phi_h2 +
                Y * Y * l4) +
           C * (r1.u_slip * Y + r1.u_slip + Y + Y * Y + r2.u_slip * Y);
  }
  return f;
}

StabilityReport stability_distance(const GalerkinSystem& A, const Trajectory& ta, const GalerkinSystem& B,
                                   const Trajectory& tb, double C, double p) {
  check_pair(A, ta, B, tb);
  const auto& bs = A.basis();
  const int J = std::max(A.lift_dim(), B.lift_dim());
  const GalerkinSystem& L = A.lift_dim() ? A : B;
  const std::size_t K = ta.states.size();
  std::vector<double> t(K), y2(K), vm(K), ct(K);
  for (std::size_t k = 0; k < K; ++k) {
    t[k] = ta.states[k].t;
    const Eigen::VectorXd db = ta.states[k].beta - tb.states[k].beta;
    const Eigen::VectorXd dc = ta.states[k].chi - tb.states[k].chi;
    const Eigen::VectorXd dm = ta.mu[k] - tb.mu[k];
    double u2 = db.squaredNorm(), us = db.cwiseAbs2().dot(bs.lambda_v);
    if (J > 0) {
      const Eigen::VectorXd ds = lift_coeff(ta, k, J) - lift_coeff(tb, k, J);
      u2 += 2.0 * db.dot(L.lift_proj() * ds) + ds.dot(L.lift_l2() * ds);
      us += 2.0 * db.dot(L.lift_slip_proj() * ds) + ds.dot(L.lift_slip() * ds);
      // boundary data of the difference
      Eigen::VectorXd sa = Eigen::VectorXd::Zero(J), dsa = sa, sb = sa, dsb = sa;
      if (A.lift_dim() && !A.lift()->is_zero()) A.lift()->coefficients(t[k], sa, dsa);
      if (B.lift_dim() && !B.lift()->is_zero()) B.lift()->coefficients(t[k], sb, dsb);
      const auto& lay = L.lift()->control().layout();
      const auto& g = *bs.geom;
      const auto v = combine_samples(g, lay, sa - sb);
      const auto d = combine_samples(g, lay, dsa - dsb);
      const double h = hp_gamma_norm(g, v.a, v.b, d.a, d.b, p);
      ct[k] = h * h;
    }
    double gp = 0.0, ph = 0.0, mu2 = 0.0;
    for (int j = 0; j < bs.np(); ++j) {
      const double l = bs.lambda_p(j);
      gp += dc(j) * dc(j) * (1.0 - bs.theta / l);
      ph += dc(j) * dc(j) * l;
      mu2 += dm(j) * dm(j) / l;
    }
    y2[k] = u2 + gp;
    vm[k] = us + ph + mu2;
  }
  const auto f = stability_ftilde(A, ta, B, tb, C);
  StabilityReport rep;
  rep.H.resize(K);
  double I = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    if (k > 0) I += 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
    rep.H[k] = std::exp(-I);
  }
  std::vector<double> a(K), c(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double h2 = rep.H[k] * rep.H[k];
    rep.sup_term = std::max(rep.sup_term, h2 * y2[k]);
    a[k] = h2 * vm[k];
    c[k] = h2 * ct[k];
  }
  rep.int_term = 2.0 * trapz(t, a);
  rep.ctrl_term = trapz(t, c);
  rep.init_term = y2.empty() ? 0.0 : y2[0];
  rep.lhs = rep.sup_term + rep.int_term;
  rep.rhs = rep.init_term + rep.ctrl_term;
  rep.ratio = rep.rhs > 0 ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

StabilityEnsemble stability_ensemble(const std::vector<StabilityReport>& r) {
  if (r.empty()) throw std::invalid_argument("stability_ensemble: empty");
  std::vector<double> l, h;
  for (const auto& x : r) l.push_back(x.lhs), h.push_back(x.rhs);
  StabilityEnsemble e;
  e.lhs = mean_ci(l);
  e.rhs = mean_ci(h);
  e.ratio = e.rhs.mean > 0 ? e.lhs.mean / e.rhs.mean : 0.0;
  return e;
}

std::vector<double> h_weight(const EnergyTrace& tr) {
  std::vector<double> h(tr.rec.size());
  double I = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const auto& r = tr.rec[k];
    const double g2 = r.G * r.G;
    if (k > 0) {
      const auto& q = tr.rec[k - 1];
      I += 0.5 * (r.t - q.t) * (g2 * r.V2 + q.G * q.G * q.V2);
    }
    h[k] = g2 * r.E + I;
  }
  return h;
}

double stopping_time(std::span<const double> t, std::span<const double> h, double N) {
  if (!(N > 0)) throw std::invalid_argument("stopping_time: N must be positive");
  if (t.size() != h.size() || t.empty()) throw std::invalid_argument("stopping_time: size mismatch");
  for (std::size_t k = 0; k < t.size(); ++k)
    if (h[k] >= N) return t[k];
  return t.back();
}

double stopping_time_diag(const EnergyTrace& tr, double N) {
  const auto h = h_weight(tr);
  return stopping_time(times_of(tr), h, N);
}

std::vector<double> sigma_h(std::span<const double> t, std::span<const double> h, double C0) {
  if (t.size() != h.size()) throw std::invalid_argument("sigma_h: size mismatch");
  std::vector<double> s(t.size());
  double I = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k > 0) I += 0.5 * (t[k] - t[k - 1]) * (h[k] * h[k] + h[k - 1] * h[k - 1]);
    s[k] = std::exp(-C0 * (t[k] - t[0]) - I);
  }
  return s;
}

StrongOrderReport strong_order_study(const GalerkinSystem& sys, const GalerkinState& init, double T,
                                     std::span<const double> dts, double dt_ref, std::uint64_t master_seed,
                                     int paths, StepOptions opt) {
  if (paths < 1) throw std::invalid_argument("strong_order_study: need at least one path");
  if (!(dt_ref > 0)) throw std::invalid_argument("strong_order_study: dt_ref must be positive");
  const long N = std::lround(T / dt_ref);
  if (std::abs(N * dt_ref - T) > 1e-9 * std::max(1.0, T))
    throw std::invalid_argument("strong_order_study: T must be a multiple of dt_ref");
  std::vector<long> strides;
  for (double dt : dts) {
    const long s = std::lround(dt / dt_ref);
    if (s < 1 || std::abs(s * dt_ref - dt) > 1e-9 * dt)
      throw std::invalid_argument("strong_order_study: every dt must be a multiple of dt_ref");
    strides.push_back(s);
  }
  StrongOrderReport rep;
  rep.dt.assign(dts.begin(), dts.end());
  rep.error.assign(dts.size(), 0.0);
  rep.dt_ref = dt_ref;
  rep.paths = paths;
  const int m = sys.noise().m();
  for (int i = 0; i < paths; ++i) {
    const BrownianPath bm(path_seed(master_seed, static_cast<std::uint64_t>(i)), m, dt_ref, N);
    const auto ref = simulate_path(sys, {T, dt_ref, opt}, init, bm, 1);
    for (std::size_t j = 0; j < dts.size(); ++j) {
      const auto run = simulate_path(sys, {T, dts[j], opt}, init, bm, strides[j]);
      rep.error[j] += y_distance2(sys, run.states.back(), ref.states.back()) / paths;
    }
  }
  for (auto& e : rep.error) e = std::sqrt(e);
  if (dts.size() >= 2) rep.slope = loglog_slope(rep.dt, rep.error);
  return rep;
}

PerturbationReport perturbation_study(const GalerkinSystem& sys, const PathSettings& ps, const GalerkinState& init,
                                      const Eigen::VectorXd& dchi, std::span<const double> eps, std::uint64_t seed,
                                      double C) {
  if (dchi.size() != init.chi.size()) throw std::invalid_argument("perturbation_study: direction size mismatch");
  PerturbationReport rep;
  const auto base = simulate_path(sys, ps, init, seed);
  const auto again = simulate_path(sys, ps, init, seed);
  rep.identical_lhs = stability_distance(sys, base, sys, again, C, ps.opt.p).lhs;
  for (double e : eps) {
    GalerkinState pert = init;
    pert.chi += e * dchi;
    const auto run = simulate_path(sys, ps, pert, seed);
    const auto r = stability_distance(sys, base, sys, run, C, ps.opt.p);
    rep.eps.push_back(e);
    rep.lhs.push_back(r.lhs);
    rep.ratio.push_back(r.ratio);
    rep.H_end = std::min(rep.H_end, r.H.empty() ? 1.0 : r.H.back());
  }
  if (rep.eps.size() >= 2) rep.slope = loglog_slope(rep.eps, rep.lhs);
  return rep;
}

}  // namespace acns
