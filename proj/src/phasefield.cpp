#include "acns/phasefield.hpp"

#include <cmath>
#include <stdexcept>

#include "acns/kernels.hpp"

namespace acns {

void PotentialSpec::validate() const {
  if (!(theta > 0)) throw std::invalid_argument("potential: theta must be positive");
  if (!(delta > 0) || !(xi > 0)) throw std::invalid_argument("potential: delta and xi must be positive");
  if (delta > xi) throw std::invalid_argument("potential: delta must not exceed xi");
  if (!(cf > 0)) throw std::invalid_argument("potential: cf must be positive");
}

PotentialValues potential_eval(double r, const PotentialSpec& spec) {
  const double q = r * r - 1.0;
  PotentialValues v;
  v.F = q * q;
  v.f = 4.0 * r * q;
  v.f_theta = v.f - spec.shift() * r;
  v.F_theta = v.F - 0.5 * spec.shift() * r * r;
  return v;
}

bool growth_bound_holds(const PotentialSpec& spec, int samples) {
  for (int i = 0; i < samples; ++i) {
    const double r = -10.0 + 20.0 * i / (samples - 1);
    const double a = std::abs(r);
    const double d[2] = {4.0 * r * r * r - 4.0 * r, 12.0 * r * r - 4.0};
    for (int k = 0; k < 2; ++k)
      if (std::abs(d[k]) > spec.cf * (1.0 + std::pow(a, 4 - k))) return false;
  }
  return true;
}

ScalarField chemical_potential(const ScalarField& phi, const PotentialSpec& spec) {
  ScalarField mu = a_theta_apply(phi, spec.theta);
  std::vector<double> f(phi.v.size());
  kernels::double_well(phi.v, spec.shift(), f);
  for (std::size_t i = 0; i < f.size(); ++i) mu.v[i] += f[i];
  return mu;
}

double free_energy(const ScalarField& phi) {
  return kernels::double_well_energy(phi.geom->interior_weights, phi.v);
}

double energy_E(const VectorField& u, const ScalarField& phi) {
  return l2_inner(u, u) + grad_inner(phi, phi) + free_energy(phi);
}

double energy_tilde(const VectorField& u, const ScalarField& phi) {
  return l2_inner(u, u) + grad_inner(phi, phi) + 2.0 * free_energy(phi);
}

}  // namespace acns
