#pragma once

#include <complex>
#include <limits>
#include <vector>

#include "bcheun/model.hpp"

namespace bcheun::reference {

/// z^exponent * sum_n c_n z^n about the origin, c_0 = 1.
struct OriginSeries {
  Complex exponent;
  std::vector<Complex> coeffs;
  double radius_hint = std::numeric_limits<double>::infinity();

  /// `ref` picks the branch of z^exponent (see branch_pow); irrelevant for exponent 0.
  Jet eval(Complex z, Complex ref = 1.0) const;
};

/// Exponent 0 by default; pass 1 - gamma for the second local solution.
OriginSeries origin_series(const BcHeunParams& p, int N, Complex exponent = 0.0);

struct OdeTrajectory {
  std::vector<Complex> path;
  std::vector<Complex> u;
  std::vector<Complex> du;
  double tol = 0.0;
  int steps = 0;
  int rejected = 0;

  Complex final_u() const { return u.back(); }
  Complex final_du() const { return du.back(); }
};

struct IntegratorOptions {
  double tol = 1e-12;
  long max_steps = 1000000;
};

/// Dormand-Prince 5(4) along the straight segment from -> to.
OdeTrajectory integrate(const BcHeunParams& p, Complex from, Complex u0, Complex du0, Complex to,
                        const IntegratorOptions& opt = {});

/// Piecewise-straight path through `waypoints` (first entry is the start).
OdeTrajectory integrate_path(const BcHeunParams& p, const std::vector<Complex>& waypoints, Complex u0,
                             Complex du0, const IntegratorOptions& opt = {});

/// epsilon = 0: u = e^{sz}[c1 M(a, gamma, s0 z) + c2 U(a, gamma, s0 z)],
/// s0 = sign * sqrt(delta^2 - 4 alpha), s = -(delta + s0)/2, a = (q - gamma s)/s0.
Jet closed_form_eps0(const BcHeunParams& p, Complex z, Complex c1, Complex c2, int s0_sign = +1);

/// alpha = q = 0: u = c1 + c2 * int_base^z e^{-delta t - eps t^2/2} t^{-gamma} dt.
Jet quadrature_alpha_q_zero(const BcHeunParams& p, Complex z, Complex c1, Complex c2, Complex base = 1.0);

}  // namespace bcheun::reference
