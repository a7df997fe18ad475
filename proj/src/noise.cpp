#include "acns/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace acns {

NoiseModel make_noise_model(std::vector<NoiseChannel> channels, double declared_K) {
  double ssum = 0.0, hsum = 0.0, smax2 = 0.0;
  for (const auto& c : channels) {
    if (c.cutoff < 0 || c.h_mode < 0) throw std::invalid_argument("noise: negative mode index");
    ssum += std::abs(c.sigma);
    hsum += std::abs(c.h_amp);
    smax2 = std::max(smax2, c.sigma * c.sigma);
  }
  NoiseModel m;
  m.channels = std::move(channels);
  m.K = declared_K >= 0.0 ? declared_K : 2.0 * std::max(ssum * ssum, hsum * hsum);
  if (m.K < smax2) throw std::invalid_argument("noise: declared K below max sigma^2");
  return m;
}

Eigen::MatrixXd noise_coefficients(const NoiseModel& model, const Eigen::VectorXd& vcoef) {
  const auto nv = vcoef.size();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nv, model.m());
  for (int k = 0; k < model.m(); ++k) {
    const auto& c = model.channels[k];
    const Eigen::Index cut = std::min<Eigen::Index>(c.cutoff, nv);
    if (c.sigma != 0.0) G.col(k).head(cut) = c.sigma * vcoef.head(cut);
    if (c.h_amp != 0.0) {
      if (c.h_mode >= nv) throw std::invalid_argument("noise: additive mode outside the Galerkin basis");
      G(c.h_mode, k) += c.h_amp;
    }
  }
  return G;
}

std::vector<VectorField> noise_apply(const GalerkinBasis& basis, const NoiseModel& model, const VectorField& v) {
  if (v.geom->nx != basis.geom->nx || v.geom->ny != basis.geom->ny)
    throw std::invalid_argument("noise_apply: geometry mismatch");
  const Eigen::VectorXd c = project_velocity(basis, v);
  const Eigen::MatrixXd G = noise_coefficients(model, c);
  std::vector<VectorField> out;
  for (int k = 0; k < model.m(); ++k) out.push_back(reconstruct_velocity(basis, G.col(k)));
  return out;
}

double noise_norm(const std::vector<VectorField>& g) {
  double s = 0.0;
  for (const auto& f : g) s += std::sqrt(l2_inner(f, f));
  return s;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t path_seed(std::uint64_t master, std::uint64_t path) {
  return splitmix64(master ^ splitmix64(path + 0x5bd1e995ULL));
}

std::vector<double> sample_wiener(double dt, int m, Rng& rng) {
  if (!(dt > 0)) throw std::invalid_argument("sample_wiener: dt must be positive");
  if (m < 0) throw std::invalid_argument("sample_wiener: negative channel count");
  std::vector<double> w(m);
  const double s = std::sqrt(dt);
  for (auto& x : w) x = s * rng.normal();
  return w;
}

BrownianPath::BrownianPath(std::uint64_t seed, int m, double dt_fine, long steps)
    : m_(m), dt_(dt_fine), steps_(steps) {
  if (!(dt_fine > 0)) throw std::invalid_argument("BrownianPath: dt must be positive");
  Rng rng(seed);
  inc_.resize(static_cast<std::size_t>(steps) * m);
  const double s = std::sqrt(dt_fine);
  for (auto& x : inc_) x = s * rng.normal();
}

void BrownianPath::increment(long step, long stride, std::vector<double>& out) const {
  out.assign(m_, 0.0);
  const long first = step * stride;
  if (first + stride > steps_) throw std::out_of_range("BrownianPath: increment beyond sampled horizon");
  for (long f = first; f < first + stride; ++f)
    for (int k = 0; k < m_; ++k) out[k] += inc_[static_cast<std::size_t>(f) * m_ + k];
}

H1Audit audit_h1(const GalerkinBasis& basis, const NoiseModel& model, int pairs, std::uint64_t seed) {
  if (pairs < 1) throw std::invalid_argument("audit_h1: pairs must be at least 1");
  Rng rng(seed);
  const int nv = basis.nv();
  auto draw = [&] {
    // amplitudes spread over four decades so both small and large |v| are probed
    const double scale = std::pow(10.0, 4.0 * rng.uniform() - 2.0);
    Eigen::VectorXd c(nv);
    for (int i = 0; i < nv; ++i) c[i] = scale * rng.normal();
    return reconstruct_velocity(basis, c);
  };
  // rounding slack on the grid norms
  constexpr double slack = 1e-10;
  H1Audit r;
  r.pairs = pairs;
  for (int i = 0; i < pairs; ++i) {
    const auto v = draw(), w = draw();
    const auto gv = noise_apply(basis, model, v), gw = noise_apply(basis, model, w);
    std::vector<VectorField> diff;
    for (int k = 0; k < model.m(); ++k) {
      VectorField d = gv[k];
      for (std::size_t q = 0; q < d.x.size(); ++q) d.x[q] -= gw[k].x[q], d.y[q] -= gw[k].y[q];
      diff.push_back(std::move(d));
    }
    VectorField vw = v;
    for (std::size_t q = 0; q < vw.x.size(); ++q) vw.x[q] -= w.x[q], vw.y[q] -= w.y[q];
    const double dvw = l2_inner(vw, vw), nv2 = l2_inner(v, v);
    const double lip = std::pow(noise_norm(diff), 2), gro = std::pow(noise_norm(gv), 2);
    if (dvw > 0) r.max_lipschitz = std::max(r.max_lipschitz, lip / dvw);
    r.max_growth = std::max(r.max_growth, gro / (1.0 + nv2));
    if (lip > model.K * dvw * (1 + slack) + 1e-300) ++r.lipschitz_violations;
    if (gro > model.K * (1.0 + nv2) * (1 + slack)) ++r.growth_violations;
  }
  return r;
}

}  // namespace acns
