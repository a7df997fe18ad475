#include "acns/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "acns/kernels.hpp"
#include "acns/legendre.hpp"

namespace acns {

namespace {

using RowMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using RowMapMut = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

void check_same(const GeometryPtr& a, const GeometryPtr& b) {
  if (!a || !b) throw std::invalid_argument("field without geometry");
  if (a != b && (a->nx != b->nx || a->ny != b->ny))
    throw std::invalid_argument("geometry mismatch between fields");
}

std::span<const double> weights(const ChannelGeometry& g) { return g.interior_weights; }

double wall_sum(const ChannelGeometry& g, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  const std::size_t top = static_cast<std::size_t>(g.ny - 1) * g.nx;
  for (int i = 0; i < g.nx; ++i)
    s += g.wall_weights[i] * (a[i] * b[i] + a[top + i] * b[top + i]);
  return s;
}

}  // namespace

std::vector<double> ddx(const ChannelGeometry& g, std::span<const double> f) {
  std::vector<double> out(g.size());
  RowMap F(f.data(), g.ny, g.nx);
  RowMapMut O(out.data(), g.ny, g.nx);
  O.noalias() = F * g.dx.transpose();
  return out;
}

std::vector<double> ddy(const ChannelGeometry& g, std::span<const double> f) {
  std::vector<double> out(g.size());
  RowMap F(f.data(), g.ny, g.nx);
  RowMapMut O(out.data(), g.ny, g.nx);
  O.noalias() = g.dy * F;
  return out;
}

VectorGrad gradient(const VectorField& u) {
  const auto& g = *u.geom;
  return {ddx(g, u.x), ddy(g, u.x), ddx(g, u.y), ddy(g, u.y)};
}

std::vector<double> divergence(const VectorField& u) {
  const auto& g = *u.geom;
  auto d = ddx(g, u.x);
  const auto e = ddy(g, u.y);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += e[i];
  return d;
}

std::vector<double> normal_trace(const VectorField& u) {
  const auto& g = *u.geom;
  std::vector<double> out(2 * g.nx);
  const std::size_t top = static_cast<std::size_t>(g.ny - 1) * g.nx;
  for (int i = 0; i < g.nx; ++i) {
    out[i] = -u.y[i];
    out[g.nx + i] = u.y[top + i];
  }
  return out;
}

std::vector<double> tangential_trace(const VectorField& u) {
  const auto& g = *u.geom;
  std::vector<double> out(2 * g.nx);
  const std::size_t top = static_cast<std::size_t>(g.ny - 1) * g.nx;
  for (int i = 0; i < g.nx; ++i) {
    out[i] = u.x[i];
    out[g.nx + i] = -u.x[top + i];
  }
  return out;
}

std::vector<double> wall_values(const ScalarField& s) {
  const auto& g = *s.geom;
  std::vector<double> out(2 * g.nx);
  const std::size_t top = static_cast<std::size_t>(g.ny - 1) * g.nx;
  for (int i = 0; i < g.nx; ++i) {
    out[i] = s.v[i];
    out[g.nx + i] = s.v[top + i];
  }
  return out;
}

std::vector<double> normal_derivative(const ScalarField& s) {
  const auto& g = *s.geom;
  const auto fy = ddy(g, s.v);
  std::vector<double> out(2 * g.nx);
  const std::size_t top = static_cast<std::size_t>(g.ny - 1) * g.nx;
  for (int i = 0; i < g.nx; ++i) {
    out[i] = -fy[i];
    out[g.nx + i] = fy[top + i];
  }
  return out;
}

double integrate(const ChannelGeometry& g, std::span<const double> f) {
  return kernels::dot(weights(g), f);
}

double l2_inner(const ScalarField& a, const ScalarField& b) {
  check_same(a.geom, b.geom);
  return kernels::dot3(weights(*a.geom), a.v, b.v);
}

double l2_inner(const VectorField& a, const VectorField& b) {
  check_same(a.geom, b.geom);
  const auto w = weights(*a.geom);
  return kernels::dot3(w, a.x, b.x) + kernels::dot3(w, a.y, b.y);
}

double slip_inner(const VectorField& v, const VectorField& z, double alpha) {
  check_same(v.geom, z.geom);
  const auto& g = *v.geom;
  const auto gv = gradient(v);
  const auto gz = gradient(z);
  const auto w = weights(g);
  // 2 D:D = 2 ux_x zx_x + 2 uy_y zy_y + (ux_y + uy_x)(zx_y + zy_x)
  std::vector<double> sv(g.size()), sz(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    sv[i] = gv.xy[i] + gv.yx[i];
    sz[i] = gz.xy[i] + gz.yx[i];
  }
  const double strain = 2.0 * kernels::dot3(w, gv.xx, gz.xx) + 2.0 * kernels::dot3(w, gv.yy, gz.yy) +
                        kernels::dot3(w, sv, sz);
  const double bdry = wall_sum(g, v.x, z.x) + wall_sum(g, v.y, z.y);
  return strain + alpha * bdry;
}

double grad_inner(const ScalarField& a, const ScalarField& b) {
  check_same(a.geom, b.geom);
  const auto& g = *a.geom;
  const auto w = weights(g);
  return kernels::dot3(w, ddx(g, a.v), ddx(g, b.v)) + kernels::dot3(w, ddy(g, a.v), ddy(g, b.v));
}

double lp_norm(const ChannelGeometry& g, std::span<const double> f, double p) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += g.interior_weights[i] * std::pow(std::abs(f[i]), p);
  return std::pow(s, 1.0 / p);
}

Norms norms(const ScalarField& f) {
  const auto& g = *f.geom;
  const auto w = weights(g);
  const auto fx = ddx(g, f.v);
  const auto fy = ddy(g, f.v);
  const auto fxx = ddx(g, fx);
  const auto fxy = ddy(g, fx);
  const auto fyy = ddy(g, fy);
  Norms n;
  const double l2sq = kernels::dot3(w, f.v, f.v);
  const double gsq = kernels::dot3(w, fx, fx) + kernels::dot3(w, fy, fy);
  const double hsq = kernels::dot3(w, fxx, fxx) + 2.0 * kernels::dot3(w, fxy, fxy) + kernels::dot3(w, fyy, fyy);
  n.l2 = std::sqrt(l2sq);
  n.grad_l2 = std::sqrt(gsq);
  n.h1 = std::sqrt(l2sq + gsq);
  n.h2 = std::sqrt(l2sq + gsq + hsq);
  n.l4 = lp_norm(g, f.v, 4.0);
  double m = 0.0;
  for (double v : f.v) m = std::max(m, std::abs(v));
  n.linf = m;
  n.boundary_l2 = std::sqrt(wall_sum(g, f.v, f.v));
  std::vector<double> gm(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) gm[i] = std::sqrt(fx[i] * fx[i] + fy[i] * fy[i]);
  n.grad_l4 = lp_norm(g, gm, 4.0);
  return n;
}

Norms norms(const VectorField& u) {
  const auto& g = *u.geom;
  ScalarField a(u.geom), b(u.geom);
  a.v = u.x;
  b.v = u.y;
  const Norms na = norms(a), nb = norms(b);
  Norms n;
  auto comb = [](double p, double q) { return std::sqrt(p * p + q * q); };
  n.l2 = comb(na.l2, nb.l2);
  n.grad_l2 = comb(na.grad_l2, nb.grad_l2);
  n.h1 = comb(na.h1, nb.h1);
  n.h2 = comb(na.h2, nb.h2);
  n.boundary_l2 = comb(na.boundary_l2, nb.boundary_l2);
  std::vector<double> mag(g.size());
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    mag[i] = std::sqrt(u.x[i] * u.x[i] + u.y[i] * u.y[i]);
    m = std::max(m, mag[i]);
  }
  n.l4 = lp_norm(g, mag, 4.0);
  n.linf = m;
  const auto gr = gradient(u);
  for (std::size_t i = 0; i < g.size(); ++i)
    mag[i] = std::sqrt(gr.xx[i] * gr.xx[i] + gr.xy[i] * gr.xy[i] + gr.yx[i] * gr.yx[i] + gr.yy[i] * gr.yy[i]);
  n.grad_l4 = lp_norm(g, mag, 4.0);
  return n;
}

double neumann_residual(const ScalarField& f) {
  const auto dn = normal_derivative(f);
  const Norms n = norms(f);
  double m = 0.0;
  for (double v : dn) m = std::max(m, std::abs(v));
  return n.h1 > 0 ? m / n.h1 : m;
}

double div_residual(const VectorField& u) {
  const auto d = divergence(u);
  const double dn = std::sqrt(kernels::dot3(weights(*u.geom), d, d));
  const double un = norms(u).h1;
  return un > 0 ? dn / un : dn;
}

ScalarField a_theta_apply(const ScalarField& phi, double theta) {
  if (!phi.neumann) throw std::invalid_argument("a_theta_apply: field is not flagged Neumann");
  if (!(theta > 0)) throw std::invalid_argument("a_theta_apply: theta must be positive");
  const auto& g = *phi.geom;
  const auto fxx = ddx(g, ddx(g, phi.v));
  const auto fyy = ddy(g, ddy(g, phi.v));
  ScalarField out(phi.geom, false);
  for (std::size_t i = 0; i < g.size(); ++i) out.v[i] = -(fxx[i] + fyy[i]) + theta * phi.v[i];
  return out;
}

double hilbert_boundary_norm(const ChannelGeometry& g, std::span<const double> samples, double s) {
  if (samples.size() != 2 * static_cast<std::size_t>(g.nx))
    throw std::invalid_argument("hilbert_boundary_norm: expected 2*Nx samples");
  const int n = g.nx;
  double total = 0.0;
  for (int wall = 0; wall < 2; ++wall) {
    const double* v = samples.data() + wall * n;
    for (int k = -n / 2; k < n / 2 + (n % 2); ++k) {
      double re = 0.0, im = 0.0;
      for (int i = 0; i < n; ++i) {
        const double ang = k * g.x[i];
        re += v[i] * std::cos(ang);
        im -= v[i] * std::sin(ang);
      }
      re /= n;
      im /= n;
      total += std::pow(1.0 + double(k) * k, s) * (re * re + im * im);
    }
  }
  return std::sqrt(total);
}

double hp_gamma_norm(const ChannelGeometry& g, std::span<const double> a, std::span<const double> b,
                     std::span<const double> dta, std::span<const double> dtb, double p) {
  if (!(p > 2.0)) throw std::invalid_argument("hp_gamma_norm: p must exceed 2");
  return hilbert_boundary_norm(g, a, 1.0 - 1.0 / p) + hilbert_boundary_norm(g, dta, 0.5) +
         hilbert_boundary_norm(g, b, -1.0 / p) + hilbert_boundary_norm(g, b, 0.0) +
         hilbert_boundary_norm(g, dtb, -0.5);
}

// ---------------------------------------------------------------------------
// spectrum

namespace {

struct Profile {
  std::vector<double> f, d1, d2;  // values and y-derivatives at the GLL nodes
};

Profile make_profile(const ChannelGeometry& g, const std::vector<double>& coeffs) {
  // coeffs: Legendre coefficients in s = 2y - 1
  Profile p;
  p.f.assign(g.ny, 0.0);
  for (int j = 0; j < g.ny; ++j) {
    const double s = 2.0 * g.y[j] - 1.0;
    for (std::size_t m = 0; m < coeffs.size(); ++m)
      if (coeffs[m] != 0.0) p.f[j] += coeffs[m] * legendre::value(static_cast<int>(m), s);
  }
  Eigen::Map<const Eigen::VectorXd> f(p.f.data(), g.ny);
  Eigen::VectorXd d1 = g.dy * f;
  Eigen::VectorXd d2 = g.dy * d1;
  p.d1.assign(d1.data(), d1.data() + g.ny);
  p.d2.assign(d2.data(), d2.data() + g.ny);
  return p;
}

std::vector<Profile> velocity_profiles(const ChannelGeometry& g, int k) {
  const int P = g.pdeg();
  std::vector<Profile> out;
  if (k == 0) {
    for (int m = 0; m <= P; ++m) {
      std::vector<double> c(m + 1, 0.0);
      c[m] = 1.0;
      out.push_back(make_profile(g, c));
    }
  } else {
    for (int m = 0; m + 2 <= P; ++m) {
      std::vector<double> c(m + 3, 0.0);
      c[m] = 1.0;
      c[m + 2] = -1.0;
      out.push_back(make_profile(g, c));
    }
  }
  return out;
}

std::vector<Profile> phase_profiles(const ChannelGeometry& g) {
  const int P = g.pdeg();
  std::vector<Profile> out;
  out.push_back(make_profile(g, {1.0}));
  for (int m = 1; m + 2 <= P; ++m) {
    std::vector<double> c(m + 3, 0.0);
    c[m] = 1.0;
    c[m + 2] = -double(m) * (m + 1) / ((m + 2.0) * (m + 3.0));
    out.push_back(make_profile(g, c));
  }
  return out;
}

// grid columns of the velocity candidates for wavenumber k and parity
void velocity_columns(const ChannelGeometry& g, int k, int parity, const std::vector<Profile>& prof,
                      VelocityTable& t) {
  const int m = static_cast<int>(prof.size());
  const auto G = static_cast<Eigen::Index>(g.size());
  for (auto* M : {&t.ux, &t.uy, &t.ux_x, &t.ux_y, &t.uy_x, &t.uy_y}) M->setZero(G, m);
  for (int c = 0; c < m; ++c) {
    const auto& q = prof[c];
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const auto r = static_cast<Eigen::Index>(g.index(i, j));
        if (k == 0) {
          t.ux(r, c) = q.f[j];
          t.ux_y(r, c) = q.d1[j];
          continue;
        }
        const double cs = std::cos(k * g.x[i]), sn = std::sin(k * g.x[i]);
        // streamfunction psi = X(x) q(y), u = (psi_y, -psi_x)
        const double X = parity == 0 ? cs : sn;
        const double Xp = parity == 0 ? -k * sn : k * cs;
        const double Xpp = -double(k) * k * X;
        t.ux(r, c) = X * q.d1[j];
        t.uy(r, c) = -Xp * q.f[j];
        t.ux_x(r, c) = Xp * q.d1[j];
        t.ux_y(r, c) = X * q.d2[j];
        t.uy_x(r, c) = -Xpp * q.f[j];
        t.uy_y(r, c) = -Xp * q.d1[j];
      }
  }
}

void phase_columns(const ChannelGeometry& g, int k, int parity, const std::vector<Profile>& prof, PhaseTable& t) {
  const int m = static_cast<int>(prof.size());
  const auto G = static_cast<Eigen::Index>(g.size());
  for (auto* M : {&t.f, &t.f_x, &t.f_y}) M->setZero(G, m);
  for (int c = 0; c < m; ++c) {
    const auto& q = prof[c];
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const auto r = static_cast<Eigen::Index>(g.index(i, j));
        double X = 1.0, Xp = 0.0;
        if (k > 0) {
          const double cs = std::cos(k * g.x[i]), sn = std::sin(k * g.x[i]);
          X = parity == 0 ? cs : sn;
          Xp = parity == 0 ? -k * sn : k * cs;
        }
        t.f(r, c) = X * q.f[j];
        t.f_x(r, c) = Xp * q.f[j];
        t.f_y(r, c) = X * q.d1[j];
      }
  }
}

Eigen::MatrixXd weighted_gram(const Eigen::VectorXd& w, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.transpose() * w.asDiagonal() * b;
}

Eigen::MatrixXd tangent_rows(const ChannelGeometry& g, const Eigen::MatrixXd& ux) {
  Eigen::MatrixXd t(2 * g.nx, ux.cols());
  const Eigen::Index top = static_cast<Eigen::Index>(g.ny - 1) * g.nx;
  for (int i = 0; i < g.nx; ++i) {
    t.row(i) = ux.row(i);
    t.row(g.nx + i) = -ux.row(top + i);
  }
  return t;
}

void velocity_forms(const ChannelGeometry& g, const VelocityTable& t, double alpha, Eigen::MatrixXd& K,
                    Eigen::MatrixXd& M) {
  const Eigen::Map<const Eigen::VectorXd> w(g.interior_weights.data(), g.size());
  M = weighted_gram(w, t.ux, t.ux) + weighted_gram(w, t.uy, t.uy);
  const Eigen::MatrixXd s = t.ux_y + t.uy_x;
  K = 2.0 * weighted_gram(w, t.ux_x, t.ux_x) + 2.0 * weighted_gram(w, t.uy_y, t.uy_y) + weighted_gram(w, s, s);
  const Eigen::MatrixXd tr = tangent_rows(g, t.ux);
  Eigen::VectorXd ww(2 * g.nx);
  for (int i = 0; i < g.nx; ++i) ww(i) = ww(g.nx + i) = g.wall_weights[i];
  K += alpha * weighted_gram(ww, tr, tr);
  K = 0.5 * (K + K.transpose()).eval();
  M = 0.5 * (M + M.transpose()).eval();
}

void phase_forms(const ChannelGeometry& g, const PhaseTable& t, double theta, Eigen::MatrixXd& K, Eigen::MatrixXd& M) {
  const Eigen::Map<const Eigen::VectorXd> w(g.interior_weights.data(), g.size());
  M = weighted_gram(w, t.f, t.f);
  K = weighted_gram(w, t.f_x, t.f_x) + weighted_gram(w, t.f_y, t.f_y) + theta * M;
  K = 0.5 * (K + K.transpose()).eval();
  M = 0.5 * (M + M.transpose()).eval();
}

// deterministic sign: first entry of largest magnitude is positive
void fix_signs(Eigen::MatrixXd& v) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    Eigen::Index arg = 0;
    for (Eigen::Index r = 1; r < v.rows(); ++r)
      if (std::abs(v(r, c)) > std::abs(v(arg, c)) * (1.0 + 1e-12)) arg = r;
    if (v(arg, c) < 0) v.col(c) *= -1.0;
  }
}

void append_cols(Eigen::MatrixXd& dst, const Eigen::MatrixXd& src) {
  if (dst.size() == 0) {
    dst = src;
    return;
  }
  Eigen::MatrixXd tmp(dst.rows(), dst.cols() + src.cols());
  tmp << dst, src;
  dst.swap(tmp);
}

}  // namespace

Spectrum build_spectrum(GeometryPtr geom, double alpha, double theta) {
  if (!(alpha > 0)) throw std::invalid_argument("build_spectrum: alpha must be positive");
  if (!(theta > 0)) throw std::invalid_argument("build_spectrum: theta must be positive");
  const auto& g = *geom;
  Spectrum sp;
  sp.geom = geom;
  sp.alpha = alpha;
  sp.theta = theta;
  const int K = g.kmax();
  const auto pprof = phase_profiles(g);

  for (int k = 0; k <= K; ++k) {
    // velocity block
    const auto vprof = velocity_profiles(g, k);
    VelocityTable cand;
    velocity_columns(g, k, 0, vprof, cand);
    Spectrum::Block vb;
    velocity_forms(g, cand, alpha, vb.stiff, vb.mass);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ves(vb.stiff, vb.mass);
    if (ves.info() != Eigen::Success) throw std::runtime_error("velocity eigensolver failed");
    vb.vecs = ves.eigenvectors();
    fix_signs(vb.vecs);
    const Eigen::VectorXd lv = ves.eigenvalues();
    for (int parity = 0; parity < (k == 0 ? 1 : 2); ++parity) {
      VelocityTable c;
      if (parity == 0)
        c = cand;
      else
        velocity_columns(g, k, 1, vprof, c);
      VelocityTable e{c.ux * vb.vecs, c.uy * vb.vecs, c.ux_x * vb.vecs, c.ux_y * vb.vecs,
                      c.uy_x * vb.vecs, c.uy_y * vb.vecs, Eigen::MatrixXd()};
      e.tang = tangent_rows(g, e.ux);
      for (Eigen::Index m = 0; m < lv.size(); ++m) {
        sp.order.push_back({ModeKind::velocity, k, parity, static_cast<int>(sp.lambda_v.size()), lv(m)});
        sp.lambda_v.push_back(lv(m));
      }
      append_cols(sp.vel.ux, e.ux);
      append_cols(sp.vel.uy, e.uy);
      append_cols(sp.vel.ux_x, e.ux_x);
      append_cols(sp.vel.ux_y, e.ux_y);
      append_cols(sp.vel.uy_x, e.uy_x);
      append_cols(sp.vel.uy_y, e.uy_y);
      append_cols(sp.vel.tang, e.tang);
    }
    sp.vblocks.push_back(std::move(vb));

    // phase block: eigenvectors normalized in a_theta, so |psi|^2 = 1/lambda
    PhaseTable pc;
    phase_columns(g, k, 0, pprof, pc);
    Spectrum::Block pb;
    phase_forms(g, pc, theta, pb.stiff, pb.mass);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> pes(pb.stiff, pb.mass);
    if (pes.info() != Eigen::Success) throw std::runtime_error("phase eigensolver failed");
    const Eigen::VectorXd lp = pes.eigenvalues();
    pb.vecs = pes.eigenvectors() * lp.cwiseSqrt().cwiseInverse().asDiagonal();
    fix_signs(pb.vecs);
    for (int parity = 0; parity < (k == 0 ? 1 : 2); ++parity) {
      PhaseTable c;
      if (parity == 0)
        c = pc;
      else
        phase_columns(g, k, 1, pprof, c);
      for (Eigen::Index m = 0; m < lp.size(); ++m) {
        sp.order.push_back({ModeKind::phase, k, parity, static_cast<int>(sp.lambda_p.size()), lp(m)});
        sp.lambda_p.push_back(lp(m));
      }
      append_cols(sp.phase.f, c.f * pb.vecs);
      append_cols(sp.phase.f_x, c.f_x * pb.vecs);
      append_cols(sp.phase.f_y, c.f_y * pb.vecs);
    }
    sp.pblocks.push_back(std::move(pb));
  }

  std::stable_sort(sp.order.begin(), sp.order.end(), [](const ModeInfo& a, const ModeInfo& b) {
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    if (a.kind != b.kind) return a.kind == ModeKind::velocity;
    if (a.k != b.k) return a.k < b.k;
    if (a.parity != b.parity) return a.parity < b.parity;
    return a.column < b.column;
  });
  for (const auto& m : sp.order)
    if (!(m.lambda > 0)) throw std::runtime_error("build_spectrum: non-positive eigenvalue");
  return sp;
}

GalerkinBasis galerkin_basis(const Spectrum& spec, int n) {
  if (n < 1) throw std::invalid_argument("galerkin_basis: n must be >= 1");
  if (n > spec.dim())
    throw std::invalid_argument("galerkin_basis: n exceeds the discrete space dimension " +
                                std::to_string(spec.dim()));
  GalerkinBasis b;
  b.geom = spec.geom;
  b.alpha = spec.alpha;
  b.theta = spec.theta;
  b.n = n;
  std::vector<int> vc, pc;
  for (int i = 0; i < n; ++i) {
    ModeInfo m = spec.order[i];
    if (m.kind == ModeKind::velocity) {
      vc.push_back(m.column);
      m.column = static_cast<int>(vc.size()) - 1;
    } else {
      pc.push_back(m.column);
      m.column = static_cast<int>(pc.size()) - 1;
    }
    b.modes.push_back(m);
  }
  auto pick = [](const Eigen::MatrixXd& src, const std::vector<int>& cols) {
    Eigen::MatrixXd out(src.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = src.col(cols[c]);
    return out;
  };
  b.vel = {pick(spec.vel.ux, vc), pick(spec.vel.uy, vc), pick(spec.vel.ux_x, vc), pick(spec.vel.ux_y, vc),
           pick(spec.vel.uy_x, vc), pick(spec.vel.uy_y, vc), pick(spec.vel.tang, vc)};
  b.phase = {pick(spec.phase.f, pc), pick(spec.phase.f_x, pc), pick(spec.phase.f_y, pc)};
  b.lambda_v.resize(static_cast<Eigen::Index>(vc.size()));
  b.lambda_p.resize(static_cast<Eigen::Index>(pc.size()));
  for (std::size_t i = 0; i < vc.size(); ++i) b.lambda_v(static_cast<Eigen::Index>(i)) = spec.lambda_v[vc[i]];
  for (std::size_t i = 0; i < pc.size(); ++i) b.lambda_p(static_cast<Eigen::Index>(i)) = spec.lambda_p[pc[i]];
  return b;
}

VectorField velocity_mode(const GalerkinBasis& b, int col) {
  VectorField u(b.geom, true);
  Eigen::Map<Eigen::VectorXd>(u.x.data(), u.x.size()) = b.vel.ux.col(col);
  Eigen::Map<Eigen::VectorXd>(u.y.data(), u.y.size()) = b.vel.uy.col(col);
  return u;
}

ScalarField phase_mode(const GalerkinBasis& b, int col) {
  ScalarField f(b.geom, true);
  Eigen::Map<Eigen::VectorXd>(f.v.data(), f.v.size()) = b.phase.f.col(col);
  return f;
}

VectorField reconstruct_velocity(const GalerkinBasis& b, const Eigen::VectorXd& beta) {
  VectorField u(b.geom, true);
  if (b.nv() == 0) return u;
  Eigen::Map<Eigen::VectorXd>(u.x.data(), u.x.size()) = b.vel.ux * beta;
  Eigen::Map<Eigen::VectorXd>(u.y.data(), u.y.size()) = b.vel.uy * beta;
  return u;
}

ScalarField reconstruct_phase(const GalerkinBasis& b, const Eigen::VectorXd& chi) {
  ScalarField f(b.geom, true);
  if (b.np() == 0) return f;
  Eigen::Map<Eigen::VectorXd>(f.v.data(), f.v.size()) = b.phase.f * chi;
  return f;
}

double mode_y_inner(const GalerkinBasis& b, int i, int j) {
  const auto& mi = b.modes.at(i);
  const auto& mj = b.modes.at(j);
  if (mi.kind != mj.kind) return 0.0;
  const Eigen::Map<const Eigen::VectorXd> w(b.geom->interior_weights.data(), b.geom->size());
  const int a = mi.column, c = mj.column;
  if (mi.kind == ModeKind::velocity)
    return (w.array() * (b.vel.ux.col(a).array() * b.vel.ux.col(c).array() +
                         b.vel.uy.col(a).array() * b.vel.uy.col(c).array()))
        .sum();
  return (w.array() * (b.phase.f_x.col(a).array() * b.phase.f_x.col(c).array() +
                       b.phase.f_y.col(a).array() * b.phase.f_y.col(c).array() +
                       b.theta * b.phase.f.col(a).array() * b.phase.f.col(c).array()))
      .sum();
}

double mode_v_inner(const GalerkinBasis& b, int i, int j) {
  const auto& mi = b.modes.at(i);
  const auto& mj = b.modes.at(j);
  if (mi.kind != mj.kind) return 0.0;
  const auto& g = *b.geom;
  const Eigen::Map<const Eigen::VectorXd> w(g.interior_weights.data(), g.size());
  const int a = mi.column, c = mj.column;
  if (mi.kind == ModeKind::velocity) {
    const auto& t = b.vel;
    const Eigen::ArrayXd sa = t.ux_y.col(a).array() + t.uy_x.col(a).array();
    const Eigen::ArrayXd sc = t.ux_y.col(c).array() + t.uy_x.col(c).array();
    double v = (w.array() * (2.0 * t.ux_x.col(a).array() * t.ux_x.col(c).array() +
                             2.0 * t.uy_y.col(a).array() * t.uy_y.col(c).array() + sa * sc))
                   .sum();
    for (int r = 0; r < g.nx; ++r)
      v += b.alpha * g.wall_weights[r] *
           (t.tang(r, a) * t.tang(r, c) + t.tang(g.nx + r, a) * t.tang(g.nx + r, c));
    return v;
  }
  // discrete A acts on an eigenmode as lambda; (A psi_i, A psi_j) = l_i l_j (psi_i, psi_j)
  const double m = (w.array() * b.phase.f.col(a).array() * b.phase.f.col(c).array()).sum();
  return b.lambda_p(a) * b.lambda_p(c) * m;
}

VectorField project_div_free(const Spectrum& spec, const VectorField& w) {
  check_same(spec.geom, w.geom);
  const auto& g = *spec.geom;
  const Eigen::Map<const Eigen::VectorXd> wt(g.interior_weights.data(), g.size());
  const Eigen::Map<const Eigen::VectorXd> wx(w.x.data(), g.size()), wy(w.y.data(), g.size());
  const Eigen::VectorXd c =
      spec.vel.ux.transpose() * wt.cwiseProduct(wx) + spec.vel.uy.transpose() * wt.cwiseProduct(wy);
  VectorField out(spec.geom, true);
  Eigen::Map<Eigen::VectorXd>(out.x.data(), g.size()) = spec.vel.ux * c;
  Eigen::Map<Eigen::VectorXd>(out.y.data(), g.size()) = spec.vel.uy * c;
  return out;
}

Eigen::VectorXd project_velocity(const GalerkinBasis& b, const VectorField& u) {
  const auto& g = *b.geom;
  const Eigen::Map<const Eigen::VectorXd> wt(g.interior_weights.data(), g.size());
  const Eigen::Map<const Eigen::VectorXd> ux(u.x.data(), g.size()), uy(u.y.data(), g.size());
  if (b.nv() == 0) return Eigen::VectorXd();
  return b.vel.ux.transpose() * wt.cwiseProduct(ux) + b.vel.uy.transpose() * wt.cwiseProduct(uy);
}

Eigen::VectorXd phase_load(const GalerkinBasis& b, std::span<const double> grid_values) {
  const auto& g = *b.geom;
  const Eigen::Map<const Eigen::VectorXd> wt(g.interior_weights.data(), g.size());
  const Eigen::Map<const Eigen::VectorXd> v(grid_values.data(), g.size());
  if (b.np() == 0) return Eigen::VectorXd();
  return b.phase.f.transpose() * wt.cwiseProduct(v);
}

void export_basis_csv(const GalerkinBasis& b, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  char buf[64];
  out << "n," << b.n << "\n";
  out << "lambda";
  for (const auto& m : b.modes) {
    std::snprintf(buf, sizeof buf, ",%.17g", m.lambda);
    out << buf;
  }
  out << "\n";
  // one row per mode: kind,k,parity, then grid samples (ux|uy or phi)
  for (const auto& m : b.modes) {
    out << (m.kind == ModeKind::velocity ? "velocity" : "phase") << "," << m.k << "," << m.parity;
    auto dump = [&](const Eigen::MatrixXd& t) {
      for (Eigen::Index r = 0; r < t.rows(); ++r) {
        std::snprintf(buf, sizeof buf, ",%.17g", t(r, m.column));
        out << buf;
      }
    };
    if (m.kind == ModeKind::velocity) {
      dump(b.vel.ux);
      dump(b.vel.uy);
    } else {
      dump(b.phase.f);
    }
    out << "\n";
  }
}

}  // namespace acns
