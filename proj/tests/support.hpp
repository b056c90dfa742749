#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "bcheun/model.hpp"
#include "bcheun/reference.hpp"

namespace bcheun::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  Complex box(double half) { return {uniform(-half, half), uniform(-half, half)}; }
  Complex box(double re_lo, double re_hi, double im_half) { return {uniform(re_lo, re_hi), uniform(-im_half, im_half)}; }
  Complex annulus(double r0, double r1) { return std::polar(uniform(r0, r1), uniform(-M_PI, M_PI)); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

 private:
  std::mt19937_64 gen_;
};

// Components uniform in [-2,2]^2, |alpha|, |q| >= 0.1.
inline BcHeunParams draw_params(Rng& rng) {
  for (;;) {
    BcHeunParams p{rng.box(2), rng.box(2), rng.box(2), rng.box(2), rng.box(2)};
    if (std::abs(p.alpha) >= 0.1 && std::abs(p.q) >= 0.1) return p;
  }
}

inline double dist_to_integer(Complex z) { return std::abs(z - std::round(z.real())); }

inline double rel(Complex a, Complex b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

// Error of (u, u') against a reference pair, relative to the reference pair's size.
inline double jet_rel(const Jet& a, const Jet& ref) {
  const double s = std::hypot(std::abs(ref.u), std::abs(ref.du));
  return std::hypot(std::abs(a.u - ref.u), std::abs(a.du - ref.du)) / s;
}

// Local basis at the origin: f (exponent 0) and g (exponent 1 - gamma).
struct OriginBasis {
  reference::OriginSeries f, g;
  Complex ref;

  OriginBasis(const BcHeunParams& p, int N, Complex branch_ref)
      : f(reference::origin_series(p, N)), g(reference::origin_series(p, N, 1.0 - p.gamma)), ref(branch_ref) {}

  // Coefficients (cf, cg) reproducing the given (u, u') at z.
  std::pair<Complex, Complex> fit(Complex z, const Jet& target) const {
    const Jet a = f.eval(z, ref), b = g.eval(z, ref);
    const Complex det = a.u * b.du - b.u * a.du;
    return {(target.u * b.du - b.u * target.du) / det, (a.u * target.du - target.u * a.du) / det};
  }

  Jet eval(Complex z, std::pair<Complex, Complex> c) const {
    const Jet a = f.eval(z, ref), b = g.eval(z, ref);
    return {c.first * a.u + c.second * b.u, c.first * a.du + c.second * b.du,
            c.first * a.d2u + c.second * b.d2u};
  }
};

}  // namespace bcheun::testing
