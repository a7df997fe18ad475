#pragma once
// Affine multiplicative noise g^k(t,v) = sigma_k P_{m_k} v + h_k driven by an
// m-channel Wiener process.

#include <cstdint>
#include <random>
#include <vector>

#include "acns/spaces.hpp"

namespace acns {

struct NoiseChannel {
  double sigma = 0.0;
  int cutoff = 0;     // m_k: number of leading velocity modes kept by the projection
  int h_mode = 0;     // velocity mode carrying the additive part
  double h_amp = 0.0; // |h_k|
};

struct NoiseModel {
  std::vector<NoiseChannel> channels;
  double K = 0.0;  // declared Lipschitz / growth constant
  int m() const { return static_cast<int>(channels.size()); }
};

// declared K = 2 max((sum sigma)^2, (sum |h|)^2); rejects K < max sigma^2
NoiseModel make_noise_model(std::vector<NoiseChannel> channels, double declared_K = -1.0);

// grid-valued g^k(t, v), k = 1..m
std::vector<VectorField> noise_apply(const GalerkinBasis& basis, const NoiseModel& model, const VectorField& v);
// |g|_{L2} = sum_k |g^k|
double noise_norm(const std::vector<VectorField>& g);

// coefficient form: column k holds (g^k, w_i); vcoef holds (v, w_i)
Eigen::MatrixXd noise_coefficients(const NoiseModel& model, const Eigen::VectorXd& vcoef);

// Brute-force check of the Lipschitz and growth bounds with the declared K:
// |g(v)-g(w)|^2 <= K |v-w|^2 and |g(v)|^2 <= K (1 + |v|^2), |g| = sum_k |g^k|.
struct H1Audit {
  int pairs = 0;
  double max_lipschitz = 0;  // max |g(v)-g(w)|^2 / |v-w|^2
  double max_growth = 0;     // max |g(v)|^2 / (1 + |v|^2)
  int lipschitz_violations = 0, growth_violations = 0;
};
H1Audit audit_h1(const GalerkinBasis& basis, const NoiseModel& model, int pairs, std::uint64_t seed);

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t path_seed(std::uint64_t master, std::uint64_t path);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}
  double normal() { return norm_(eng_); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> norm_{0.0, 1.0};
};

// m independent N(0, dt) draws
std::vector<double> sample_wiener(double dt, int m, Rng& rng);

// Pre-sampled increments on a fine grid; coarser steps sum consecutive
// fine increments so paths at different dt share one Brownian motion.
class BrownianPath {
 public:
  BrownianPath() = default;
  BrownianPath(std::uint64_t seed, int m, double dt_fine, long steps);
  int m() const { return m_; }
  double dt() const { return dt_; }
  long steps() const { return steps_; }
  // increment over fine steps [step*stride, (step+1)*stride)
  void increment(long step, long stride, std::vector<double>& out) const;

 private:
  int m_ = 0;
  double dt_ = 0.0;
  long steps_ = 0;
  std::vector<double> inc_;
};

}  // namespace acns
