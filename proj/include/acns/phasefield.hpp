#pragma once
// Quartic double well F(r) = (r^2-1)^2 and its shifted variant.

#include "acns/spaces.hpp"

namespace acns {

struct PotentialSpec {
  double cf = 6.0;
  double theta = 1.0;
  double delta = 1.0;
  double xi = 1.0;
  double shift() const { return delta / xi; }
  void validate() const;
};

struct PotentialValues {
  double F = 0, f = 0, F_theta = 0, f_theta = 0;
};

PotentialValues potential_eval(double r, const PotentialSpec& spec);
// |f^{(i)}(r)| <= cf (1 + |r|^{4-i}) for i = 0, 1 on samples of [-10, 10]
bool growth_bound_holds(const PotentialSpec& spec, int samples = 2001);

// mu = A_theta phi + f_theta(phi), pointwise on the grid
ScalarField chemical_potential(const ScalarField& phi, const PotentialSpec& spec);

double free_energy(const ScalarField& phi);  // int F(phi)
// E = |u|^2 + |grad phi|^2 + int F(phi)
double energy_E(const VectorField& u, const ScalarField& phi);
// |u|^2 + |grad phi|^2 + 2 int F(phi), the form whose balance closes exactly
double energy_tilde(const VectorField& u, const ScalarField& phi);

}  // namespace acns
