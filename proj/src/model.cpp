#include "bcheun/model.hpp"

#include <algorithm>
#include <cmath>

#include "bcheun/errors.hpp"

namespace bcheun {

BcHeunParams from_ronveaux(Complex alpha_r, Complex beta_r, Complex gamma_r, Complex delta_r) {
  BcHeunParams p;
  p.gamma = 1.0 + alpha_r;
  p.delta = -beta_r;
  p.epsilon = -2.0;
  p.alpha = gamma_r - alpha_r - 2.0;
  p.q = (delta_r + (1.0 + alpha_r) * beta_r) / 2.0;
  return p;
}

BcHeunParams from_dlmf(Complex gamma_d, Complex delta_d, Complex alpha_d, Complex q_d) {
  return {-gamma_d, -delta_d, -1.0, alpha_d, q_d};
}

Complex degeneracy_measure(const BcHeunParams& p) {
  if (p.alpha == 0.0) throw Error(ErrorCode::AlphaZero, "z0 = q/alpha needs alpha != 0");
  const Complex z0 = p.q / p.alpha;
  return p.gamma + p.delta * z0 + p.epsilon * z0 * z0;
}

bool is_degenerate_pair(const BcHeunParams& p) {
  const Complex z0 = p.q / p.alpha;
  const double scale = 1.0 + std::abs(p.gamma) + std::abs(p.delta * z0) + std::abs(p.epsilon * z0 * z0);
  return std::abs(degeneracy_measure(p)) <= 1e-12 * scale;
}

SingularStructure singular_structure(const BcHeunParams& p) {
  if (p.alpha == 0.0) throw Error(ErrorCode::AlphaZero, "singular_structure");
  if (p.alpha + p.epsilon == 0.0) throw Error(ErrorCode::AlphaPlusEpsZero, "z1, z2 need alpha + epsilon != 0");
  SingularStructure s;
  s.z0 = p.q / p.alpha;
  const Complex r = std::sqrt(degeneracy_measure(p) / (p.alpha + p.epsilon));
  s.z1 = s.z0 + r;
  s.z2 = s.z0 - r;
  s.degenerate = is_degenerate_pair(p);
  if (s.degenerate) s.z1 = s.z2 = s.z0;
  const double zs = std::max(1.0, std::abs(s.z0));
  s.root_at_origin = std::abs(s.z1) <= 1e-12 * zs || std::abs(s.z2) <= 1e-12 * zs;
  return s;
}

Polynomial pi_polynomial(const BcHeunParams& p) {
  const auto& [g, d, e, a, q] = p;
  return Polynomial{q * (q + (g - 1.0) * d), -(a * (2.0 * q + g * d) + q * e * (2.0 - g)), a * (a + e - g * e)};
}

Polynomial p3_delta_polynomial(const BcHeunParams& p) {
  const auto& [g, d, e, a, q] = p;
  return Polynomial{q * q, -q * (2.0 * a + (2.0 - g) * e), a * a + q * d * e + a * e * (1.0 - g), -a * d * e};
}

Polynomial p3_eps_polynomial(const BcHeunParams& p) {
  const auto& [g, d, e, a, q] = p;
  return Polynomial{q * q + q * d * (g - 1.0), -a * (2.0 * q + g * d), a * a + q * d * e, -a * d * e};
}

Complex pi_quadratic(const BcHeunParams& p, Complex z) { return pi_polynomial(p)(z); }
Complex p3_delta(const BcHeunParams& p, Complex z) { return p3_delta_polynomial(p)(z); }
Complex p3_eps(const BcHeunParams& p, Complex z) { return p3_eps_polynomial(p)(z); }

OdeResidual residual(const BcHeunParams& p, Complex z, Complex u, Complex u1, Complex u2) {
  if (z == 0.0) throw Error(ErrorCode::OriginSingular, "residual at z = 0");
  const Complex t1 = (p.gamma / z + p.delta + p.epsilon * z) * u1;
  const Complex t0 = (p.alpha * z - p.q) / z * u;
  OdeResidual r;
  r.value = u2 + t1 + t0;
  const double scale = std::max({std::abs(u2), std::abs(t1), std::abs(t0), 1e-300});
  r.relative = std::abs(r.value) / scale;
  return r;
}

Complex branch_log(Complex z, Complex ref) {
  return {std::log(std::abs(z)), std::arg(ref) + std::arg(z / ref)};
}

Complex branch_pow(Complex z, Complex a, Complex ref) {
  if (z == 0.0) return a.real() > 0.0 ? Complex{0.0} : Complex{std::nan(""), 0.0};
  return std::exp(a * branch_log(z, ref));
}

}  // namespace bcheun
