#include "acns/lifting.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace acns {

namespace {

using cd = std::complex<double>;

std::vector<cd> wall_dft(const ChannelGeometry& g, const double* v, int kmax) {
  std::vector<cd> out(kmax + 1);
  for (int k = 0; k <= kmax; ++k) {
    cd s = 0.0;
    for (int i = 0; i < g.nx; ++i) s += v[i] * std::polar(1.0, -k * g.x[i]);
    out[k] = s / double(g.nx);
  }
  return out;
}

// n-th derivative (n = 0..3) of the four biharmonic profiles at y
void profiles(double k, double y, double d[4][4]) {
  const double e1 = std::exp(-k * y), e2 = std::exp(-k * (1.0 - y));
  const double z = 1.0 - y;
  double pk = 1.0;  // (-k)^n
  double pk1 = 0.0; // n (-k)^{n-1}
  for (int n = 0; n < 4; ++n) {
    const double kn = std::pow(k, n);
    d[0][n] = pk * e1;
    d[1][n] = kn * e2;
    d[2][n] = e1 * (pk * y + pk1);
    d[3][n] = (n % 2 == 0 ? 1.0 : -1.0) * e2 * (pk * z + pk1);
    pk1 = (n + 1) * pk;
    pk *= -k;
  }
}

}  // namespace

StokesLift solve_stokes_lift(GeometryPtr geom, std::span<const double> a, std::span<const double> b, double alpha) {
  const auto& g = *geom;
  const auto nb = 2 * static_cast<std::size_t>(g.nx);
  if (a.size() != nb || b.size() != nb) throw std::invalid_argument("solve_stokes_lift: expected 2*Nx samples");
  if (!(alpha > 0)) throw std::invalid_argument("solve_stokes_lift: alpha must be positive");
  double anorm = 0.0;
  for (double v : a) anorm = std::max(anorm, std::abs(v));
  const double flux = boundary_integral(g, a);
  if (std::abs(flux) > 1e-10 * std::max(1.0, anorm) * g.lx)
    throw std::invalid_argument("solve_stokes_lift: compatibility violated, int_Gamma a = " + std::to_string(flux));

  const int kmax = g.nx / 2 - 1;  // Nyquist dropped
  const auto ab = wall_dft(g, a.data(), kmax), at = wall_dft(g, a.data() + g.nx, kmax);
  const auto bb = wall_dft(g, b.data(), kmax), bt = wall_dft(g, b.data() + g.nx, kmax);

  StokesLift out{VectorField(geom, true), VectorGrad{}, ScalarField(geom)};
  const auto G = g.size();
  out.grad.xx.assign(G, 0.0);
  out.grad.xy.assign(G, 0.0);
  out.grad.yx.assign(G, 0.0);
  out.grad.yy.assign(G, 0.0);

  // k = 0: a = (c0 + c1 y, m), p = 0
  {
    const double m = at[0].real();
    Eigen::Matrix2d A;
    A << alpha, -1.0, -alpha, -1.0 - alpha;
    const Eigen::Vector2d c = A.lu().solve(Eigen::Vector2d(bb[0].real(), bt[0].real()));
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const auto r = g.index(i, j);
        out.a.x[r] = c(0) + c(1) * g.y[j];
        out.a.y[r] = m;
        out.grad.xy[r] = c(1);
      }
  }

  for (int k = 1; k <= kmax; ++k) {
    const cd rb = ab[k], rt = at[k], sb = bb[k], st = bt[k];
    if (std::abs(rb) + std::abs(rt) + std::abs(sb) + std::abs(st) == 0.0) continue;
    const double kk = k;
    double d0[4][4], d1[4][4];
    profiles(kk, 0.0, d0);
    profiles(kk, 1.0, d1);
    Eigen::Matrix4d M;
    for (int c = 0; c < 4; ++c) {
      M(0, c) = d0[c][0];
      M(1, c) = -(d0[c][2] + kk * kk * d0[c][0]) + alpha * d0[c][1];
      M(2, c) = d1[c][0];
      M(3, c) = -(d1[c][2] + kk * kk * d1[c][0]) - alpha * d1[c][1];
    }
    const cd I(0.0, 1.0);
    Eigen::Vector4cd rhs;
    rhs << rb / (I * kk), sb, rt / (-I * kk), st;
    Eigen::FullPivLU<Eigen::Matrix4d> lu(M);
    if (!lu.isInvertible() || lu.rcond() < 1e-14) throw std::runtime_error("solve_stokes_lift: singular mode system");
    const Eigen::Vector4cd coef = lu.solve(rhs.real()).cast<cd>() + I * lu.solve(rhs.imag()).cast<cd>();
    for (int j = 0; j < g.ny; ++j) {
      double d[4][4];
      profiles(kk, g.y[j], d);
      cd psi[4];
      for (int n = 0; n < 4; ++n) {
        psi[n] = 0.0;
        for (int c = 0; c < 4; ++c) psi[n] += coef(c) * d[c][n];
      }
      const cd ax = psi[1], ay = -I * kk * psi[0];
      const cd axx = I * kk * psi[1], axy = psi[2], ayx = kk * kk * psi[0], ayy = -I * kk * psi[1];
      const cd p = (psi[3] - kk * kk * psi[1]) / (I * kk);
      for (int i = 0; i < g.nx; ++i) {
        const auto r = g.index(i, j);
        const cd e = std::polar(2.0, kk * g.x[i]);
        out.a.x[r] += (ax * e).real();
        out.a.y[r] += (ay * e).real();
        out.grad.xx[r] += (axx * e).real();
        out.grad.xy[r] += (axy * e).real();
        out.grad.yx[r] += (ayx * e).real();
        out.grad.yy[r] += (ayy * e).real();
        out.p.v[r] += (p * e).real();
      }
    }
  }
  return out;
}

double LiftResiduals::max() const { return std::max({momentum, divergence, normal, slip}); }

LiftResiduals lift_residuals(const StokesLift& lift, std::span<const double> a, std::span<const double> b,
                             double alpha) {
  const auto& g = *lift.a.geom;
  const auto gr = gradient(lift.a);
  const auto lx = ddx(g, gr.xx), ly = ddy(g, gr.xy);
  const auto mx = ddx(g, gr.yx), my = ddy(g, gr.yy);
  const auto px = ddx(g, lift.p.v), py = ddy(g, lift.p.v);
  double scale_m = 1e-300, res_m = 0.0, res_d = 0.0, scale_u = 1e-300;
  for (std::size_t r = 0; r < g.size(); ++r) {
    const double lapx = lx[r] + ly[r], lapy = mx[r] + my[r];
    res_m = std::max({res_m, std::abs(-lapx + px[r]), std::abs(-lapy + py[r])});
    scale_m = std::max({scale_m, std::abs(lapx), std::abs(lapy), std::abs(px[r]), std::abs(py[r])});
    res_d = std::max(res_d, std::abs(gr.xx[r] + gr.yy[r]));
    scale_u = std::max({scale_u, std::abs(gr.xx[r]), std::abs(gr.xy[r]), std::abs(gr.yx[r]), std::abs(gr.yy[r]),
                        std::abs(lift.a.x[r]), std::abs(lift.a.y[r])});
  }
  const auto nt = normal_trace(lift.a);
  double res_n = 0.0, res_s = 0.0, scale_b = 1e-300;
  const std::size_t top = static_cast<std::size_t>(g.ny - 1) * g.nx;
  for (int i = 0; i < 2 * g.nx; ++i) {
    res_n = std::max(res_n, std::abs(nt[i] - a[i]));
    scale_b = std::max({scale_b, std::abs(a[i]), std::abs(b[i])});
  }
  for (int i = 0; i < g.nx; ++i) {
    const double sb = -(gr.xy[i] + gr.yx[i]) + alpha * lift.a.x[i];
    const double st = -(gr.xy[top + i] + gr.yx[top + i]) - alpha * lift.a.x[top + i];
    res_s = std::max({res_s, std::abs(sb - b[i]), std::abs(st - b[g.nx + i])});
  }
  LiftResiduals r;
  r.momentum = res_m / std::max(scale_m, scale_u);
  r.divergence = res_d / scale_u;
  r.normal = res_n / std::max(scale_b, scale_u);
  r.slip = res_s / std::max(scale_b, scale_u);
  return r;
}

LiftingField::LiftingField(GeometryPtr geom, double alpha, BoundaryControl ctrl)
    : geom_(std::move(geom)), alpha_(alpha), ctrl_(std::move(ctrl)) {
  const auto& L = ctrl_.layout();
  units_.reserve(L.per_knot());
  for (int j = 0; j < L.per_knot(); ++j) {
    const auto s = layout_basis_samples(*geom_, L, j);
    units_.push_back(solve_stokes_lift(geom_, s.a, s.b, alpha_));
  }
}

LiftingField::Sample LiftingField::at(double t) const {
  const auto G = geom_->size();
  Sample out{VectorField(geom_, true), VectorGrad{std::vector<double>(G), std::vector<double>(G),
                                                  std::vector<double>(G), std::vector<double>(G)},
             VectorField(geom_, true), ScalarField(geom_)};
  if (units_.empty()) return out;
  Eigen::VectorXd s, ds;
  ctrl_.eval(t, s, ds);
  for (std::size_t j = 0; j < units_.size(); ++j) {
    const double c = s(static_cast<Eigen::Index>(j)), dc = ds(static_cast<Eigen::Index>(j));
    if (c == 0.0 && dc == 0.0) continue;
    const auto& u = units_[j];
    for (std::size_t r = 0; r < G; ++r) {
      out.a.x[r] += c * u.a.x[r];
      out.a.y[r] += c * u.a.y[r];
      out.grad.xx[r] += c * u.grad.xx[r];
      out.grad.xy[r] += c * u.grad.xy[r];
      out.grad.yx[r] += c * u.grad.yx[r];
      out.grad.yy[r] += c * u.grad.yy[r];
      out.p.v[r] += c * u.p.v[r];
      out.dta.x[r] += dc * u.a.x[r];
      out.dta.y[r] += dc * u.a.y[r];
    }
  }
  return out;
}

LiftEstimate lift_estimate_ratio(const LiftingField& lift, std::span<const double> times, double p) {
  if (lift.is_zero()) throw std::invalid_argument("lift_estimate_ratio: zero control");
  const auto& g = *lift.geom();
  LiftEstimate est;
  for (double t : times) {
    const auto s = lift.at(t);
    const double den = lift.control().hp_norm(g, t, p);
    if (den == 0.0) continue;
    // W^{1,p} norm: (int |a|^p + |grad a|^p)^{1/p}
    std::vector<double> m(g.size());
    for (std::size_t r = 0; r < g.size(); ++r) {
      const double v = std::hypot(s.a.x[r], s.a.y[r]);
      const double d = std::sqrt(s.grad.xx[r] * s.grad.xx[r] + s.grad.xy[r] * s.grad.xy[r] +
                                 s.grad.yx[r] * s.grad.yx[r] + s.grad.yy[r] * s.grad.yy[r]);
      m[r] = std::pow(v, p) + std::pow(d, p);
    }
    const double w1p = std::pow(integrate(g, m), 1.0 / p);
    const double dt = std::sqrt(l2_inner(s.dta, s.dta));
    est.t.push_back(t);
    est.ratio.push_back((w1p + dt) / den);
    est.sup = std::max(est.sup, est.ratio.back());
  }
  if (est.t.empty()) throw std::invalid_argument("lift_estimate_ratio: control vanishes at every sample");
  return est;
}

void export_lift_csv(const LiftingField::Sample& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const auto& g = *s.a.geom;
  out << "x,y,ax,ay,p\n";
  char buf[160];
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const auto r = g.index(i, j);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", g.x[i], g.y[j], s.a.x[r], s.a.y[r], s.p.v[r]);
      out << buf;
    }
}

}  // namespace acns
