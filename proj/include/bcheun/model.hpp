#pragma once

#include <complex>

#include "bcheun/polynomial.hpp"

namespace bcheun {

using Complex = std::complex<double>;

/// Parameters of  z u'' + (gamma + delta z + epsilon z^2) u' + (alpha z - q) u = 0.
struct BcHeunParams {
  Complex gamma;
  Complex delta;
  Complex epsilon;
  Complex alpha;
  Complex q;

  bool is_reducible_eps0(double thresh = 1e-12) const { return std::abs(epsilon) <= thresh; }
  bool is_degenerate(double thresh = 1e-12) const {
    return std::abs(alpha) <= thresh && std::abs(q) <= thresh;
  }
};

/// Value and first two derivatives at a point.
struct Jet {
  Complex u;
  Complex du;
  Complex d2u;
};

struct SingularStructure {
  Complex z0;
  Complex z1;
  Complex z2;
  bool degenerate = false;
  bool root_at_origin = false;
};

struct OdeResidual {
  Complex value;
  double relative = 0.0;
};

// Alternative canonical forms.
BcHeunParams from_ronveaux(Complex alpha_r, Complex beta_r, Complex gamma_r, Complex delta_r);
BcHeunParams from_dlmf(Complex gamma_d, Complex delta_d, Complex alpha_d, Complex q_d);

SingularStructure singular_structure(const BcHeunParams& p);

/// gamma + delta z0 + epsilon z0^2, whose vanishing merges z1 and z2.
Complex degeneracy_measure(const BcHeunParams& p);
bool is_degenerate_pair(const BcHeunParams& p);

Polynomial pi_polynomial(const BcHeunParams& p);
Polynomial p3_delta_polynomial(const BcHeunParams& p);
Polynomial p3_eps_polynomial(const BcHeunParams& p);

Complex pi_quadratic(const BcHeunParams& p, Complex z);
Complex p3_delta(const BcHeunParams& p, Complex z);
Complex p3_eps(const BcHeunParams& p, Complex z);

OdeResidual residual(const BcHeunParams& p, Complex z, Complex u, Complex u1, Complex u2);
inline OdeResidual residual(const BcHeunParams& p, Complex z, const Jet& j) {
  return residual(p, z, j.u, j.du, j.d2u);
}

/// exp(a * L(z)) where L is the logarithm continued from the ray through `ref`:
/// arg L(z) = arg(ref) + Arg(z/ref). The cut runs along the ray opposite to `ref`.
Complex branch_log(Complex z, Complex ref);
Complex branch_pow(Complex z, Complex a, Complex ref);

}  // namespace bcheun
