#include "acns/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <stdexcept>

#include "acns/kernels.hpp"

namespace acns {

namespace {

using Vec = Eigen::VectorXd;
using MapC = Eigen::Map<const Eigen::VectorXd>;

void same_geometry(const ChannelGeometry& a, const ChannelGeometry& b) {
  if (a.nx != b.nx || a.ny != b.ny) throw std::invalid_argument("geometry mismatch");
}

double sym_contract(double axx, double axy, double ayx, double ayy, double bxx, double bxy, double byx, double byy) {
  // D(a):D(b) with D = (grad + grad^T)/2
  return axx * bxx + ayy * byy + 0.5 * (axy + ayx) * (bxy + byx);
}

}  // namespace

double convect(const VectorField& v, const VectorField& w, const VectorField& z) {
  const auto& g = *v.geom;
  same_geometry(g, *w.geom);
  same_geometry(g, *z.geom);
  const auto gw = gradient(w);
  std::vector<double> f(g.size());
  for (std::size_t r = 0; r < g.size(); ++r)
    f[r] = (v.x[r] * gw.xx[r] + v.y[r] * gw.xy[r]) * z.x[r] + (v.x[r] * gw.yx[r] + v.y[r] * gw.yy[r]) * z.y[r];
  return integrate(g, f);
}

double capillary(const ScalarField& mu, const ScalarField& phi, const VectorField& w) {
  const auto& g = *mu.geom;
  same_geometry(g, *phi.geom);
  same_geometry(g, *w.geom);
  const auto px = ddx(g, phi.v), py = ddy(g, phi.v);
  std::vector<double> f(g.size());
  for (std::size_t r = 0; r < g.size(); ++r) f[r] = mu.v[r] * (px[r] * w.x[r] + py[r] * w.y[r]);
  return integrate(g, f);
}

Eigen::VectorXd boundary_forcing(std::span<const double> b, const GalerkinBasis& basis) {
  const auto& g = *basis.geom;
  if (b.size() != static_cast<std::size_t>(2 * g.nx)) throw std::invalid_argument("boundary_forcing: sample count");
  Vec out(basis.nv());
  std::vector<double> f(2 * g.nx);
  for (int i = 0; i < basis.nv(); ++i) {
    for (int r = 0; r < 2 * g.nx; ++r) f[r] = b[r] * basis.vel.tang(r, i);
    out(i) = boundary_integral(g, f);
  }
  return out;
}

GalerkinSystem::GalerkinSystem(std::shared_ptr<const GalerkinBasis> basis, PotentialSpec pot,
                               std::shared_ptr<const LiftingField> lift, NoiseModel noise)
    : basis_(std::move(basis)), pot_(pot), lift_(std::move(lift)), noise_(std::move(noise)) {
  pot_.validate();
  const auto& b = *basis_;
  const auto& g = *b.geom;
  w_ = g.interior_weights;
  for (const auto& c : noise_.channels)
    if (c.h_amp != 0.0 && c.h_mode >= b.nv()) throw std::invalid_argument("noise: additive mode outside the Galerkin basis");

  const int J = lift_ ? static_cast<int>(lift_->units().size()) : 0;
  if (lift_) same_geometry(g, *lift_->geom());
  const auto G = static_cast<Eigen::Index>(g.size());
  Lx_.resize(G, J), Ly_.resize(G, J), Lxx_.resize(G, J), Lxy_.resize(G, J), Lyx_.resize(G, J), Lyy_.resize(G, J);
  for (int j = 0; j < J; ++j) {
    const auto& u = lift_->units()[j];
    Lx_.col(j) = MapC(u.a.x.data(), G);
    Ly_.col(j) = MapC(u.a.y.data(), G);
    Lxx_.col(j) = MapC(u.grad.xx.data(), G);
    Lxy_.col(j) = MapC(u.grad.xy.data(), G);
    Lyx_.col(j) = MapC(u.grad.yx.data(), G);
    Lyy_.col(j) = MapC(u.grad.yy.data(), G);
  }
  const MapC W(w_.data(), G);
  const double alpha = b.alpha;
  lift_l2_ = Lx_.transpose() * W.asDiagonal() * Lx_ + Ly_.transpose() * W.asDiagonal() * Ly_;
  lift_proj_ = b.vel.ux.transpose() * W.asDiagonal() * Lx_ + b.vel.uy.transpose() * W.asDiagonal() * Ly_;

  // wall rows of the lifts: tangential and full vector traces
  const int nx = g.nx;
  Eigen::MatrixXd Ltau(2 * nx, J), Lwx(2 * nx, J), Lwy(2 * nx, J);
  for (int i = 0; i < nx; ++i) {
    const auto rb = static_cast<Eigen::Index>(g.index(i, 0)), rt = static_cast<Eigen::Index>(g.index(i, g.ny - 1));
    for (int j = 0; j < J; ++j) {
      Ltau(i, j) = Lx_(rb, j);
      Ltau(nx + i, j) = -Lx_(rt, j);
      Lwx(i, j) = Lx_(rb, j), Lwx(nx + i, j) = Lx_(rt, j);
      Lwy(i, j) = Ly_(rb, j), Lwy(nx + i, j) = Ly_(rt, j);
    }
  }
  Vec ww(2 * nx);
  for (int i = 0; i < nx; ++i) ww(i) = ww(nx + i) = g.wall_weights[i];

  lift_slip_.resize(J, J);
  for (int i = 0; i < J; ++i)
    for (int j = i; j < J; ++j) {
      double s = 0.0;
      for (Eigen::Index r = 0; r < G; ++r)
        s += W(r) * sym_contract(Lxx_(r, i), Lxy_(r, i), Lyx_(r, i), Lyy_(r, i), Lxx_(r, j), Lxy_(r, j), Lyx_(r, j),
                                 Lyy_(r, j));
      double bd = 0.0;
      for (int r = 0; r < 2 * nx; ++r) bd += ww(r) * (Lwx(r, i) * Lwx(r, j) + Lwy(r, i) * Lwy(r, j));
      lift_slip_(i, j) = lift_slip_(j, i) = 2.0 * s + alpha * bd;
    }

  const int nv = b.nv();
  lift_slip_proj_.resize(nv, J);
  bforce_.resize(nv, J);
  for (int j = 0; j < J; ++j) {
    const auto s = layout_basis_samples(g, lift_->control().layout(), j);
    bforce_.col(j) = boundary_forcing(s.b, b);
    for (int i = 0; i < nv; ++i) {
      double v = 0.0;
      for (Eigen::Index r = 0; r < G; ++r)
        v += W(r) * sym_contract(Lxx_(r, j), Lxy_(r, j), Lyx_(r, j), Lyy_(r, j), b.vel.ux_x(r, i), b.vel.ux_y(r, i),
                                 b.vel.uy_x(r, i), b.vel.uy_y(r, i));
      double bd = 0.0;
      for (int r = 0; r < 2 * nx; ++r) bd += ww(r) * Ltau(r, j) * b.vel.tang(r, i);
      lift_slip_proj_(i, j) = 2.0 * v + alpha * bd;
    }
  }
}

GalerkinSystem::Eval GalerkinSystem::evaluate(const GalerkinState& st, const StepOptions& opt) const {
  const auto& b = *basis_;
  const auto& g = *b.geom;
  if (st.beta.size() != b.nv() || st.chi.size() != b.np())
    throw std::invalid_argument("GalerkinState: coefficient count does not match the basis");
  const auto G = static_cast<Eigen::Index>(g.size());
  const MapC W(w_.data(), G);
  const int J = lift_dim();

  Eval e;
  e.s = Vec::Zero(J), e.ds = Vec::Zero(J);
  const bool lifted = J > 0 && !lift_->is_zero();
  if (lifted) lift_->coefficients(st.t, e.s, e.ds);

  const Vec ux = b.vel.ux * st.beta, uy = b.vel.uy * st.beta;
  Vec vx = ux, vy = uy;
  Vec vxx = b.vel.ux_x * st.beta, vxy = b.vel.ux_y * st.beta, vyx = b.vel.uy_x * st.beta, vyy = b.vel.uy_y * st.beta;
  if (lifted) {
    vx += Lx_ * e.s, vy += Ly_ * e.s;
    vxx += Lxx_ * e.s, vxy += Lxy_ * e.s, vyx += Lyx_ * e.s, vyy += Lyy_ * e.s;
  }
  const Vec phi = b.phase.f * st.chi, px = b.phase.f_x * st.chi, py = b.phase.f_y * st.chi;

  const int np = b.np(), nv = b.nv();
  e.fp = Vec::Zero(np), e.adv = Vec::Zero(np);
  Vec conv = Vec::Zero(nv), cap = Vec::Zero(nv);
  Vec fth(G);
  kernels::double_well(std::span<const double>(phi.data(), G), pot_.shift(), std::span<double>(fth.data(), G));
  if (opt.nonlinear) {
    e.fp = b.phase.f.transpose() * W.cwiseProduct(fth);
    e.adv = b.phase.f.transpose() * W.cwiseProduct(vx.cwiseProduct(px) + vy.cwiseProduct(py));
  }
  e.mu = b.lambda_p.cwiseProduct(st.chi + e.fp);
  if (opt.nonlinear) {
    const Vec mu = b.phase.f * e.mu;
    const Vec cx = vx.cwiseProduct(vxx) + vy.cwiseProduct(vxy);
    const Vec cy = vx.cwiseProduct(vyx) + vy.cwiseProduct(vyy);
    conv = -(b.vel.ux.transpose() * W.cwiseProduct(cx) + b.vel.uy.transpose() * W.cwiseProduct(cy));
    const Vec mw = W.cwiseProduct(mu);
    cap = b.vel.ux.transpose() * mw.cwiseProduct(px) + b.vel.uy.transpose() * mw.cwiseProduct(py);
  }
  Vec r = Vec::Zero(nv);
  if (lifted) r = -lift_slip_proj_ * e.s - lift_proj_ * e.ds + bforce_ * e.s;
  e.fv = conv + cap + r;

  Vec vcoef = st.beta;
  if (lifted) vcoef += lift_proj_ * e.s;
  e.G = noise_coefficients(noise_, vcoef);

  // energy record
  auto& R = e.rec;
  R.t = st.t;
  const Vec& lp = b.lambda_p;
  R.u2 = st.beta.squaredNorm();
  R.u_slip = st.beta.cwiseAbs2().dot(b.lambda_v);
  R.phi_l2sq = st.chi.cwiseAbs2().cwiseQuotient(lp).sum();
  R.grad_phi2 = st.chi.squaredNorm() - b.theta * R.phi_l2sq;
  R.phi_h2 = st.chi.cwiseAbs2().dot(lp);
  const double Fint = kernels::double_well_energy(w_, std::span<const double>(phi.data(), G));
  R.E = R.u2 + R.grad_phi2 + Fint;
  R.Etilde = R.u2 + R.grad_phi2 + 2.0 * Fint;
  R.Y2 = R.u2 + R.grad_phi2;
  R.V2 = R.u_slip + R.phi_h2;
  R.mu2 = e.mu.cwiseAbs2().cwiseQuotient(lp).sum();
  {
    const Vec q = px.cwiseAbs2() + py.cwiseAbs2();
    R.grad_phi_l4 = std::pow(W.dot(q.cwiseAbs2()), 0.25);
  }
  if (lifted) {
    R.lift_l2sq = e.s.dot(lift_l2_ * e.s);
    R.lift_slip = e.s.dot(lift_slip_ * e.s);
    R.hp = lift_->control().hp_norm(g, st.t, opt.p);
  }
  R.Lambda = R.hp * R.hp + 1.0;
  R.B = std::pow(R.hp, 4) + 1.0;
  R.ftilde = R.lift_l2sq * R.lift_slip + R.Lambda;
  R.source = 2.0 * st.beta.dot(e.fv) - 2.0 * e.mu.dot(e.adv) + e.G.squaredNorm();
  return e;
}

EnergyRecord GalerkinSystem::diagnostics(const GalerkinState& st, const StepOptions& opt) const {
  return evaluate(st, opt).rec;
}

GalerkinState GalerkinSystem::em_step(const GalerkinState& st, double dt, std::span<const double> dW,
                                      const StepOptions& opt, Eval* eval_out) const {
  if (!(dt > 0)) throw std::invalid_argument("em_step: dt must be positive");
  if (static_cast<int>(dW.size()) != noise_.m()) throw std::invalid_argument("em_step: increment size mismatch");
  const auto& b = *basis_;
  Eval e = evaluate(st, opt);
  Vec rhs = st.beta + dt * e.fv;
  double mart = 0.0;
  for (int k = 0; k < noise_.m(); ++k) {
    rhs += e.G.col(k) * dW[k];
    mart += 2.0 * e.G.col(k).dot(st.beta) * dW[k];
  }
  e.rec.martingale = mart;
  GalerkinState out;
  out.t = st.t + dt;
  const double th = opt.implicitness;
  if (!(th >= 0.5 && th <= 1.0)) throw std::invalid_argument("em_step: implicitness must lie in [0.5, 1]");
  const auto lv = b.lambda_v.array(), lp = b.lambda_p.array();
  rhs.array() -= (1.0 - th) * dt * lv * st.beta.array();
  out.beta = (rhs.array() / (1.0 + th * dt * lv)).matrix();
  out.chi = (((1.0 - (1.0 - th) * dt * lp) * st.chi.array() - dt * lp * (e.fp + e.adv).array()) /
             (1.0 + th * dt * lp))
                .matrix();
  if (!out.beta.allFinite() || !out.chi.allFinite()) throw StepFailure(out.t, st);
  if (eval_out) *eval_out = std::move(e);
  return out;
}

GalerkinState GalerkinSystem::project_initial(const VectorField& u0, const ScalarField& phi0) const {
  const auto& b = *basis_;
  same_geometry(*b.geom, *u0.geom);
  same_geometry(*b.geom, *phi0.geom);
  GalerkinState s;
  s.beta = project_velocity(b, u0);
  s.chi = b.lambda_p.cwiseProduct(phase_load(b, phi0.v));
  if (s.beta.size() == 0) s.beta = Vec::Zero(b.nv());
  if (s.chi.size() == 0) s.chi = Vec::Zero(b.np());
  return s;
}

GalerkinState GalerkinSystem::initial_state(double stripe_amp, double stripe_width, double u_amp) const {
  const auto& b = *basis_;
  if (!(stripe_width > 0)) throw std::invalid_argument("initial_state: stripe width must be positive");
  const auto phi0 = sample(
      b.geom, [&](double x, double y) { return stripe_amp * std::tanh((y - 0.5 - 0.1 * std::cos(x)) / stripe_width); },
      true);
  GalerkinState s = project_initial(VectorField(b.geom, true), phi0);
  for (int i = 0; i < std::min(3, b.nv()); ++i) s.beta(i) = u_amp;
  return s;
}

Trajectory simulate_path(const GalerkinSystem& sys, const PathSettings& ps, const GalerkinState& init,
                         const BrownianPath& bm, long stride) {
  if (!(ps.T >= 0)) throw std::invalid_argument("simulate_path: T must be non-negative");
  if (!(ps.dt > 0)) throw std::invalid_argument("simulate_path: dt must be positive");
  const long N = std::lround(ps.T / ps.dt);
  if (std::abs(N * ps.dt - ps.T) > 1e-9 * std::max(1.0, ps.T))
    throw std::invalid_argument("simulate_path: T is not a multiple of dt");
  const int m = sys.noise().m();
  if (m > 0 && N > 0 && bm.m() != m) throw std::invalid_argument("simulate_path: Brownian channel count mismatch");

  Trajectory tr;
  tr.trace.C0 = ps.opt.C0;
  tr.states.reserve(N + 1);
  GalerkinState cur = init;
  std::vector<double> dW(m, 0.0);
  for (long k = 0; k < N; ++k) {
    if (m > 0) bm.increment(k, stride, dW);
    GalerkinSystem::Eval e;
    GalerkinState next = sys.em_step(cur, ps.dt, dW, ps.opt, &e);
    next.t = (k + 1) * ps.dt;  // no drift from repeated addition
    tr.states.push_back(std::move(cur));
    tr.mu.push_back(std::move(e.mu));
    tr.lift.push_back(std::move(e.s));
    tr.trace.rec.push_back(e.rec);
    cur = std::move(next);
  }
  auto e = sys.evaluate(cur, ps.opt);
  tr.states.push_back(std::move(cur));
  tr.mu.push_back(std::move(e.mu));
  tr.lift.push_back(std::move(e.s));
  tr.trace.rec.push_back(e.rec);
  finalize_trace(tr.trace, ps.opt.C0, ps.opt.quadrature);
  return tr;
}

Trajectory simulate_path(const GalerkinSystem& sys, const PathSettings& ps, const GalerkinState& init,
                         std::uint64_t seed) {
  const long N = std::max(1L, std::lround(ps.T / ps.dt));
  const int m = sys.noise().m();
  BrownianPath bm(seed, m, ps.dt, m > 0 ? N : 0);
  return simulate_path(sys, ps, init, bm, 1);
}

EnsembleResult run_ensemble(const GalerkinSystem& sys, const PathSettings& ps, const GalerkinState& init,
                            std::uint64_t master_seed, int M, int threads) {
  if (M < 1) throw std::invalid_argument("run_ensemble: need at least one path");
  std::vector<std::optional<Trajectory>> out(M);
  std::vector<EnsembleResult::Failure> fail(M);
  auto work = [&](int first, int stride) {
    for (int i = first; i < M; i += stride) {
      try {
        out[i] = simulate_path(sys, ps, init, path_seed(master_seed, static_cast<std::uint64_t>(i)));
      } catch (const StepFailure& e) {
        fail[i] = {i, e.time, e.what()};
      }
    }
  };
  threads = std::clamp(threads, 1, M);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  EnsembleResult r;
  for (int i = 0; i < M; ++i) {
    if (out[i]) {
      r.paths.push_back(std::move(*out[i]));
      r.ids.push_back(i);
    } else {
      r.failures.push_back(fail[i]);
    }
  }
  return r;
}

void finalize_trace(EnergyTrace& tr, double C0, TimeQuadrature q) {
  if (!(C0 > 0)) throw std::invalid_argument("C0 must be positive");
  tr.C0 = C0;
  auto& R = tr.rec;
  if (R.empty()) return;
  double I = 0.0, bal = 0.0, mart = 0.0;
  R[0].G = 1.0;
  R[0].residual = 0.0;
  for (std::size_t k = 1; k < R.size(); ++k) {
    const double dt = R[k].t - R[k - 1].t;
    I += 0.5 * dt * (R[k].ftilde + R[k - 1].ftilde);
    R[k].G = std::exp(-C0 * R[k].t - C0 * I);
    const double d0 = 2.0 * (R[k - 1].u_slip + R[k - 1].mu2) - R[k - 1].source;
    const double d1 = 2.0 * (R[k].u_slip + R[k].mu2) - R[k].source;
    double d = d1;
    if (q == TimeQuadrature::left) d = d0;
    if (q == TimeQuadrature::trapezoid) d = 0.5 * (d0 + d1);
    bal += dt * d;
    mart += R[k - 1].martingale;
    R[k].residual = R[k].Etilde - R[0].Etilde + bal - mart;
  }
}

double y_distance2(const GalerkinSystem& sys, const GalerkinState& a, const GalerkinState& b) {
  const auto& B = sys.basis();
  const Vec db = a.beta - b.beta, dc = a.chi - b.chi;
  double s = db.squaredNorm();
  for (int j = 0; j < B.np(); ++j) s += dc(j) * dc(j) * (1.0 - B.theta / B.lambda_p(j));
  return s;
}

}  // namespace acns
