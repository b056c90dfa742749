#include "bcheun/reference.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bcheun/errors.hpp"
#include "bcheun/special_functions.hpp"

namespace bcheun::reference {

namespace {

using State = std::array<Complex, 2>;

double segment_distance(Complex a, Complex b, Complex p) {
  const Complex d = b - a;
  const double len2 = std::norm(d);
  double t = len2 > 0.0 ? std::real((p - a) * std::conj(d)) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(a + t * d - p);
}

State rhs(const BcHeunParams& p, Complex z, const State& y, Complex dz) {
  const Complex d2 = -(p.gamma / z + p.delta + p.epsilon * z) * y[1] - (p.alpha * z - p.q) / z * y[0];
  return {dz * y[1], dz * d2};
}

State axpy(const State& y, std::initializer_list<std::pair<double, const State*>> ks, double h) {
  State out = y;
  for (const auto& [c, k] : ks) {
    out[0] += h * c * (*k)[0];
    out[1] += h * c * (*k)[1];
  }
  return out;
}

double state_norm(const State& y) { return std::max(std::abs(y[0]), std::abs(y[1])); }

}  // namespace

OriginSeries origin_series(const BcHeunParams& p, int N, Complex exponent) {
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "negative order");
  OriginSeries s;
  s.exponent = exponent;
  if (p.alpha != 0.0) s.radius_hint = std::abs(p.q / p.alpha);
  s.coeffs.assign(static_cast<std::size_t>(N) + 1, 0.0);
  s.coeffs[0] = 1.0;
  const Complex rho = exponent;
  for (int n = 1; n <= N; ++n) {
    const Complex m = static_cast<double>(n) + rho;
    const Complex lead = m * (m - 1.0 + p.gamma);
    if (std::abs(lead) <= 1e-13 * (std::abs(m) * (std::abs(m) + 1.0 + std::abs(p.gamma))))
      throw Error(ErrorCode::GammaNonpositiveInteger, "origin series breaks down at n = " + std::to_string(n));
    Complex acc = (p.delta * (m - 1.0) - p.q) * s.coeffs[static_cast<std::size_t>(n) - 1];
    if (n >= 2) acc += (p.epsilon * (m - 2.0) + p.alpha) * s.coeffs[static_cast<std::size_t>(n) - 2];
    s.coeffs[static_cast<std::size_t>(n)] = -acc / lead;
  }
  return s;
}

Jet OriginSeries::eval(Complex z, Complex ref) const {
  Complex f = 0.0, f1 = 0.0, f2 = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) {
    f2 = f2 * z + 2.0 * f1;
    f1 = f1 * z + f;
    f = f * z + coeffs[k];
  }
  if (exponent == 0.0) return {f, f1, f2};
  if (z == 0.0) throw Error(ErrorCode::OriginSingular, "non-zero exponent at the origin");
  const Complex r = exponent;
  const Complex zr = branch_pow(z, r, ref);
  return {zr * f, zr * (f1 + r * f / z), zr * (f2 + 2.0 * r * f1 / z + r * (r - 1.0) * f / (z * z))};
}

OdeTrajectory integrate(const BcHeunParams& p, Complex from, Complex u0, Complex du0, Complex to,
                        const IntegratorOptions& opt) {
  const double zscale = p.alpha != 0.0 ? std::abs(p.q / p.alpha) : std::max({std::abs(from), std::abs(to), 1.0});
  const double guard = 1e-3 * zscale;
  if (segment_distance(from, to, 0.0) < guard)
    throw Error(ErrorCode::PathTooCloseToSingularity, "path passes near z = 0");
  if (p.alpha != 0.0 && segment_distance(from, to, p.q / p.alpha) < guard)
    throw Error(ErrorCode::PathTooCloseToSingularity, "path passes near z0");

  OdeTrajectory tr;
  tr.tol = opt.tol;
  tr.path.push_back(from);
  tr.u.push_back(u0);
  tr.du.push_back(du0);
  const Complex dz = to - from;
  if (dz == 0.0) return tr;
  State y{u0, du0};
  if (state_norm(y) == 0.0) {
    tr.path.push_back(to);
    tr.u.push_back(0.0);
    tr.du.push_back(0.0);
    return tr;
  }

  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  double t = 0.0;
  double h = std::min(1.0, (zscale / 100.0) / std::abs(dz));
  auto zt = [&](double s) { return from + s * dz; };
  State k1 = rhs(p, zt(t), y, dz);
  long steps = 0;
  while (t < 1.0) {
    if (++steps > opt.max_steps) throw Error(ErrorCode::StepSizeUnderflow, "step budget exhausted");
    if (t + h > 1.0) h = 1.0 - t;
    if (h < 1e-14) throw Error(ErrorCode::StepSizeUnderflow, "step size underflow");
    const State k2 = rhs(p, zt(t + c2 * h), axpy(y, {{a21, &k1}}, h), dz);
    const State k3 = rhs(p, zt(t + c3 * h), axpy(y, {{a31, &k1}, {a32, &k2}}, h), dz);
    const State k4 = rhs(p, zt(t + c4 * h), axpy(y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, h), dz);
    const State k5 = rhs(p, zt(t + c5 * h), axpy(y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, h), dz);
    const State k6 =
        rhs(p, zt(t + h), axpy(y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, h), dz);
    const State yn = axpy(y, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}, h);
    const double tn = (t + h >= 1.0 - 1e-15) ? 1.0 : t + h;
    const State k7 = rhs(p, zt(tn), yn, dz);
    State err{};
    for (int i = 0; i < 2; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    // Error measured against the state size, so the integrator is exactly linear in the data.
    const double scale = opt.tol * std::max(state_norm(y), state_norm(yn));
    const double en = state_norm(err) / scale;
    if (en <= 1.0) {
      t = tn;
      y = yn;
      k1 = k7;
      tr.path.push_back(zt(t));
      tr.u.push_back(y[0]);
      tr.du.push_back(y[1]);
      tr.steps++;
      h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(en, 1e-10), -0.2)));
    } else {
      tr.rejected++;
      h *= std::max(0.1, 0.9 * std::pow(en, -0.2));
    }
  }
  tr.path.back() = to;
  return tr;
}

OdeTrajectory integrate_path(const BcHeunParams& p, const std::vector<Complex>& waypoints, Complex u0,
                             Complex du0, const IntegratorOptions& opt) {
  if (waypoints.empty()) throw Error(ErrorCode::InvalidArgument, "empty path");
  OdeTrajectory all;
  all.tol = opt.tol;
  all.path.push_back(waypoints.front());
  all.u.push_back(u0);
  all.du.push_back(du0);
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    auto seg = integrate(p, waypoints[i - 1], all.u.back(), all.du.back(), waypoints[i], opt);
    all.path.insert(all.path.end(), seg.path.begin() + 1, seg.path.end());
    all.u.insert(all.u.end(), seg.u.begin() + 1, seg.u.end());
    all.du.insert(all.du.end(), seg.du.begin() + 1, seg.du.end());
    all.steps += seg.steps;
    all.rejected += seg.rejected;
  }
  return all;
}

Jet closed_form_eps0(const BcHeunParams& p, Complex z, Complex c1, Complex c2, int s0_sign) {
  if (!p.is_reducible_eps0()) throw Error(ErrorCode::ConditionsNotMet, "closed form needs epsilon = 0");
  const Complex disc = p.delta * p.delta - 4.0 * p.alpha;
  const Complex s0 = (s0_sign >= 0 ? 1.0 : -1.0) * std::sqrt(disc);
  if (std::abs(s0) <= 1e-12 * (1.0 + std::abs(p.delta) + std::sqrt(std::abs(p.alpha))))
    throw Error(ErrorCode::DegenerateS0, "delta^2 = 4 alpha");
  if (c1 != 0.0 && special::is_nonpositive_integer(p.gamma))
    throw Error(ErrorCode::ConditionsNotMet, "gamma is a non-positive integer");
  const Complex s = -(p.delta + s0) / 2.0;
  const Complex a = (p.q - p.gamma * s) / s0;
  const Complex b = p.gamma;
  const Complex x = s0 * z;

  Complex f = 0.0, fx = 0.0, fxx = 0.0;
  if (c1 != 0.0) {
    const Complex m0 = special::kummer_1f1(a, b, x).value;
    const Complex m1 = a / b * special::kummer_1f1(a + 1.0, b + 1.0, x).value;
    const Complex m2 = a * (a + 1.0) / (b * (b + 1.0)) * special::kummer_1f1(a + 2.0, b + 2.0, x).value;
    f += c1 * m0;
    fx += c1 * m1;
    fxx += c1 * m2;
  }
  if (c2 != 0.0) {
    if (z == 0.0) throw Error(ErrorCode::OriginSingular, "Tricomi branch at z = 0");
    const Complex u0 = special::tricomi_u(a, b, x).value;
    const Complex u1 = -a * special::tricomi_u(a + 1.0, b + 1.0, x).value;
    const Complex u2 = a * (a + 1.0) * special::tricomi_u(a + 2.0, b + 2.0, x).value;
    f += c2 * u0;
    fx += c2 * u1;
    fxx += c2 * u2;
  }
  const Complex fz = s0 * fx, fzz = s0 * s0 * fxx;
  const Complex e = std::exp(s * z);
  return {e * f, e * (s * f + fz), e * (s * s * f + 2.0 * s * fz + fzz)};
}

Jet quadrature_alpha_q_zero(const BcHeunParams& p, Complex z, Complex c1, Complex c2, Complex base) {
  if (std::abs(p.alpha) > 1e-12 || std::abs(p.q) > 1e-12)
    throw Error(ErrorCode::ConditionsNotMet, "quadrature form needs alpha = q = 0");
  if (z == 0.0 || base == 0.0) throw Error(ErrorCode::OriginSingular, "quadrature endpoint at z = 0");
  const double guard = 1e-3 * std::max(std::abs(z), std::abs(base));
  if (segment_distance(base, z, 0.0) < guard)
    throw Error(ErrorCode::PathTooCloseToSingularity, "quadrature path passes near z = 0");
  // t^{-gamma} continued along the segment from the principal value at `base`.
  auto E = [&](Complex t) {
    return std::exp(-p.delta * t - 0.5 * p.epsilon * t * t) * branch_pow(t, -p.gamma, base);
  };
  Complex integral = 0.0;
  if (c2 != 0.0) {
    const Complex d = z - base;
    auto f = [&](double s) { return E(base + s * d) * d; };
    integral = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, 1.0, 20, 1e-13);
  }
  const Complex ez = E(z);
  return {c1 + c2 * integral, c2 * ez, c2 * ez * (-p.delta - p.epsilon * z - p.gamma / z)};
}

}  // namespace bcheun::reference
