#pragma once
// Empirical constants of the functional inequalities used by the estimates,
// measured on random resolved fields at two resolutions.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "acns/noise.hpp"
#include "acns/spaces.hpp"

namespace acns {

enum class Inequality { ladyzhenskaya, gn_mean_free, trace_interp, korn, agmon };

std::string to_string(Inequality q);
Inequality inequality_from_string(const std::string& s);
std::vector<Inequality> all_inequalities();

// v - v_D with v_D = (1/|D|) int_D v
ScalarField mean_free(const ScalarField& v);

// LHS / RHS of a single inequality; nullopt when the right side vanishes
// |u|_{L4} / (|u|^{1/2} |u|_V^{1/2}), |.|_V the slip norm
std::optional<double> ratio_ladyzhenskaya(const VectorField& u, double alpha);
// |v - v_D|_{L4} / (|v|^{1/2} |grad v|^{1/2})
std::optional<double> ratio_gn_mean_free(const ScalarField& v);
// |v - v_D|_{L4(Gamma)} / (|v|^{1/2} |grad v|^{1/2})
std::optional<double> ratio_trace_interp(const ScalarField& v);
// |u|_{H1} / |u|_V
std::optional<double> ratio_korn(const VectorField& u, double alpha);
// |v|_inf / (|v|^{1/2} |v|_{H2}^{1/2})
std::optional<double> ratio_agmon(const ScalarField& v);

struct AuditSettings {
  int nx = 16, ny = 12;
  double alpha = 1.0, theta = 1.0;
  double decay = 2.0;        // coefficient std ~ (1 + lambda)^(-decay/2)
  double growth_tol = 1.5;   // fine/coarse max ratio above this flags growth
};

struct RatioReport {
  std::string name;
  int samples = 0, skipped = 0;
  double max_ratio = 0, min_ratio = 0;
  std::string argmax;
  double max_ratio_fine = 0;
  double growth = 0;  // max_ratio_fine / max_ratio
  std::string trend;  // "stable" or "growing"
  bool finite = false;
};

// random fields in the resolved spaces of `spec`
VectorField random_velocity(const Spectrum& spec, double decay, Rng& rng);
ScalarField random_scalar(const Spectrum& spec, double decay, Rng& rng);

RatioReport audit(Inequality q, int samples, std::uint64_t seed, const AuditSettings& s = {});
// reuses spectra built once for both resolutions
RatioReport audit(Inequality q, int samples, std::uint64_t seed, const AuditSettings& s, const Spectrum& coarse,
                  const Spectrum& fine);

}  // namespace acns
