#include "bcheun/frobenius.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bcheun/errors.hpp"

namespace bcheun::frobenius {

namespace {

// Relative level below which a shifted low-order coefficient is taken to be an exact zero.
constexpr double kRootTol = 1e-11;
constexpr double kSnapTol = 1e-10;

Polynomial deflate(const Polynomial& p, Complex root, const char* what) {
  Complex rem;
  Polynomial q = p.divide_by_root(root, rem);
  const double scale = std::max(p.max_abs_coeff(), 1e-300) * std::max(1.0, std::pow(std::abs(root), p.degree()));
  if (std::abs(rem) > 1e-9 * scale)
    throw Error(ErrorCode::UnsupportedParameters, std::string("non-exact deflation of ") + what);
  return q;
}

// v = d/dz of the solution of (A, B, C) satisfies a second-order equation of its own.
void differentiate_ode(Polynomial& A, Polynomial& B, Polynomial& C) {
  const Polynomial dA = A.derivative(), dB = B.derivative(), dC = C.derivative();
  Polynomial nA = A * C;
  Polynomial nB = C * (dA + B) - dC * A;
  Polynomial nC = C * C + C * dB - dC * B;
  A = std::move(nA);
  B = std::move(nB);
  C = std::move(nC);
}

// Rewrite the equation for y in terms of w = z^k y, then multiply through by z^2.
void conjugate_by_power(Polynomial& A, Polynomial& B, Polynomial& C, Complex k) {
  const Polynomial z{0.0, 1.0};
  const Polynomial z2{0.0, 0.0, 1.0};
  Polynomial nA = A * z2;
  Polynomial nB = B * z2 - (2.0 * k) * (A * z);
  Polynomial nC = (k * (k + 1.0)) * A - k * (B * z) + C * z2;
  A = std::move(nA);
  B = std::move(nB);
  C = std::move(nC);
}

void make_monic(LocalOde& ode) {
  const Complex lead = ode.A.leading();
  ode.A *= 1.0 / lead;
  ode.B *= 1.0 / lead;
  ode.C *= 1.0 / lead;
}

std::pair<Complex, Complex> sorted(Complex a, Complex b) {
  if (b.real() > a.real()) std::swap(a, b);
  return {a, b};
}

Complex snap(Complex mu) {
  const double r = std::round(mu.real());
  return std::abs(mu - r) <= kSnapTol ? Complex{r, 0.0} : mu;
}

}  // namespace

std::string_view to_string(OdeKind kind) {
  switch (kind) {
    case OdeKind::BHE: return "BHE";
    case OdeKind::AUX_V12: return "AUX_V12";
    case OdeKind::AUX_V22: return "AUX_V22";
    case OdeKind::AUX_W23: return "AUX_W23";
    case OdeKind::AUX_GAMMA34: return "AUX_GAMMA34";
    case OdeKind::AUX_GAMMA38: return "AUX_GAMMA38";
  }
  return "?";
}

LocalOde build_local_ode(OdeKind kind, const BcHeunParams& p) {
  LocalOde ode;
  ode.kind = kind;
  const auto& [g, d, e, a, q] = p;
  if (kind == OdeKind::BHE) {
    ode.A = Polynomial{0.0, 1.0};
    ode.B = Polynomial{g, d, e};
    ode.C = Polynomial{-q, a};
    ode.singular_points = {0.0};
    return ode;
  }
  if (a == 0.0) throw Error(ErrorCode::UnsupportedParameters, "auxiliary equations need alpha != 0");
  if (q == 0.0) throw Error(ErrorCode::UnsupportedParameters, "auxiliary equations need q != 0");
  const Complex z0 = q / a;
  const Polynomial lin{-z0, 1.0};  // z - z0
  const Polynomial z{0.0, 1.0};
  ode.A = Polynomial{0.0, -z0, 1.0};
  ode.singular_points = {0.0, z0};
  // The last term of the v' = u'' equation, scaled by 1/alpha.
  const Polynomial c22 = Polynomial{(q * q - d * q - a * g) / a, -2.0 * q * (a + e) / a, a + e};
  switch (kind) {
    case OdeKind::AUX_V12:
      ode.B = Polynomial{1.0 - g, d, e} * lin - z;
      ode.C = pi_polynomial(p) * (1.0 / a);
      break;
    case OdeKind::AUX_V22:
      ode.B = Polynomial{1.0 + g, d, e} * lin - z;
      ode.C = c22;
      break;
    case OdeKind::AUX_GAMMA34:
      ode.B = Polynomial{1.0 - g, -d, e} * lin - z;
      ode.C = p3_delta_polynomial(p) * (1.0 / a);
      break;
    case OdeKind::AUX_GAMMA38:
      ode.B = Polynomial{1.0 - g, d, -e} * lin - z;
      ode.C = p3_eps_polynomial(p) * (1.0 / a);
      break;
    case OdeKind::AUX_W23: {
      if (a + e == 0.0) throw Error(ErrorCode::UnsupportedParameters, "w-equation needs alpha + epsilon != 0");
      ode.B = Polynomial{1.0 + g, d, e} * lin - z;
      ode.C = c22;
      differentiate_ode(ode.A, ode.B, ode.C);
      conjugate_by_power(ode.A, ode.B, ode.C, 1.0 + g);
      for (int i = 0; i < 2; ++i) {
        ode.A = deflate(ode.A, 0.0, "A by z");
        ode.B = deflate(ode.B, 0.0, "B by z");
        ode.C = deflate(ode.C, 0.0, "C by z");
      }
      ode.A = deflate(ode.A, z0, "A by z - z0");
      ode.B = deflate(ode.B, z0, "B by z - z0");
      ode.C = deflate(ode.C, z0, "C by z - z0");
      make_monic(ode);
      const auto s = singular_structure(p);
      ode.singular_points = {0.0, s.z1, s.z2};
      break;
    }
    case OdeKind::BHE: break;
  }
  return ode;
}

Complex RecurrenceBand::operator[](int offset) const {
  for (const auto& [k, c] : terms)
    if (k == offset) return c;
  return 0.0;
}

ShiftedOde::ShiftedOde(const LocalOde& ode, Complex center) : center_(center) {
  if (ode.A.is_zero()) throw Error(ErrorCode::InvalidArgument, "A is identically zero");
  A_ = ode.A.taylor_shift(center);
  B_ = ode.B.taylor_shift(center);
  C_ = ode.C.taylor_shift(center);

  // The center is usually a computed root, so low-order coefficients carry rounding noise.
  auto zero_below = [](Polynomial& p, int count, double scale) {
    std::vector<Complex> c = p.coeffs();
    for (int i = 0; i < count && i < static_cast<int>(c.size()); ++i)
      if (std::abs(c[static_cast<std::size_t>(i)]) <= kRootTol * scale) c[static_cast<std::size_t>(i)] = 0.0;
    p = Polynomial(std::move(c));
  };
  const double rscale = std::max(1.0, std::abs(center));
  double sa = 0.0, sb = 0.0, sc = 0.0;
  for (int i = 0; i <= ode.A.degree(); ++i) sa += std::abs(ode.A[i]) * std::pow(rscale, i);
  for (int i = 0; i <= ode.B.degree(); ++i) sb += std::abs(ode.B[i]) * std::pow(rscale, i);
  for (int i = 0; i <= ode.C.degree(); ++i) sc += std::abs(ode.C[i]) * std::pow(rscale, i);
  zero_below(A_, 3, sa);
  s_ = 0;
  while (s_ <= A_.degree() && A_[s_] == 0.0) ++s_;
  if (s_ >= 3) throw Error(ErrorCode::IrregularPoint, "A vanishes to order >= 3 at the center");
  if (s_ == 2) {
    zero_below(B_, 1, sb);
    if (B_[0] != 0.0) throw Error(ErrorCode::IrregularPoint, "double root of A without matching B");
  }
  (void)sc;
  int kmax = A_.degree() - s_;
  kmax = std::max(kmax, B_.degree() - s_ + 1);
  kmax = std::max(kmax, C_.degree() - s_ + 2);
  width_ = 1 + std::max(kmax, 0);
}

std::array<Complex, 3> ShiftedOde::indicial() const {
  // mu(mu-1) A_s + mu B_{s-1} + C_{s-2}
  const Complex a = A_[s_], b = B_[s_ - 1], c = C_[s_ - 2];
  return {c, b - a, a};
}

Complex ShiftedOde::indicial_at(Complex mu) const {
  const auto k = indicial();
  return (k[2] * mu + k[1]) * mu + k[0];
}

std::pair<Complex, Complex> ShiftedOde::exponents() const {
  const auto [c, b, a] = indicial();
  if (c == 0.0) return sorted(0.0, snap(-b / a));
  const Complex disc = std::sqrt(b * b - 4.0 * a * c);
  const Complex qq = -0.5 * (b + (std::real(std::conj(b) * disc) >= 0.0 ? disc : -disc));
  return sorted(snap(qq / a), snap(c / qq));
}

RecurrenceBand ShiftedOde::band(Complex mu, int n) const {
  RecurrenceBand r;
  r.n = n;
  for (int k = 0; k < width_ && k <= n; ++k) {
    const Complex m1 = static_cast<double>(n - k) + mu;
    const Complex ta = m1 * (m1 - 1.0) * A_[k + s_];
    const Complex tb = m1 * B_[k + s_ - 1];
    const Complex tc = C_[k + s_ - 2];
    r.terms.emplace_back(k, ta + tb + tc);
    r.magnitudes.push_back(std::abs(ta) + std::abs(tb) + std::abs(tc));
  }
  return r;
}

std::pair<Complex, Complex> indicial_exponents(const LocalOde& ode, Complex center) {
  return ShiftedOde(ode, center).exponents();
}

RecurrenceBand synthesize_recurrence(const LocalOde& ode, Complex center, Complex mu, int n) {
  return ShiftedOde(ode, center).band(mu, n);
}

FrobeniusSeries frobenius_coeffs(const LocalOde& ode, Complex center, Complex mu, int N) {
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "negative order");
  const ShiftedOde sh(ode, center);
  const auto ind = sh.indicial();
  const double iscale = std::abs(ind[2] * mu * mu) + std::abs(ind[1] * mu) + std::abs(ind[0]);
  if (std::abs(sh.indicial_at(mu)) > kSnapTol * std::max(iscale, 1e-300))
    throw Error(ErrorCode::InvalidExponent, "mu is not an indicial exponent at the center");

  FrobeniusSeries fs;
  fs.center = center;
  fs.mu = mu;
  fs.band = sh.width();
  fs.coeffs.assign(static_cast<std::size_t>(N) + 1, 0.0);
  fs.coeffs[0] = 1.0;
  for (int n = 1; n <= N; ++n) {
    const auto band = sh.band(mu, n);
    Complex rhs = 0.0;
    double rscale = 0.0;
    for (std::size_t k = 1; k < band.terms.size(); ++k) {
      const Complex t = band.terms[k].second * fs.coeffs[static_cast<std::size_t>(n) - k];
      rhs -= t;
      rscale += band.magnitudes[k] * std::abs(fs.coeffs[static_cast<std::size_t>(n) - k]);
    }
    const Complex lead = band.terms[0].second;
    if (std::abs(lead) <= 1e-12 * std::max(band.magnitudes[0], 1e-300)) {
      if (std::abs(rhs) > 1e-10 * std::max(rscale, 1e-300))
        throw Error(ErrorCode::LogarithmicCase, "leading coefficient vanishes at n = " + std::to_string(n));
      fs.coeffs[static_cast<std::size_t>(n)] = 0.0;
      continue;
    }
    fs.coeffs[static_cast<std::size_t>(n)] = rhs / lead;
  }
  return fs;
}

RecurrenceBand closed_form_band_E1(const BcHeunParams& p, Complex mu, int n) {
  if (p.alpha == 0.0) throw Error(ErrorCode::AlphaZero, "closed_form_band_E1");
  const Complex z0 = p.q / p.alpha;
  const auto& [g, d, e, a, q] = p;
  auto S = [&](Complex m) { return z0 * m * (m - 2.0); };
  auto R = [&](Complex m) { return z0 * (d + z0 * e) * (m - 1.0) + m * (m - 1.0 - g); };
  auto Q = [&](Complex m) { return -g * (d + z0 * e) + (d + 2.0 * z0 * e) * m; };
  auto P = [&](Complex m) { return a + e * (m + 1.0 - g); };
  RecurrenceBand r;
  r.n = n;
  const Complex m = static_cast<double>(n) + mu;
  r.terms.emplace_back(0, S(m));
  if (n >= 1) r.terms.emplace_back(1, R(m - 1.0));
  if (n >= 2) r.terms.emplace_back(2, Q(m - 2.0));
  if (n >= 3) r.terms.emplace_back(3, P(m - 3.0));
  for (const auto& t : r.terms) r.magnitudes.push_back(std::abs(t.second));
  return r;
}

std::pair<Complex, Complex> printed_five_term_edges(const BcHeunParams& p, Complex root, Complex other,
                                                    Complex mu, int n) {
  const Complex m = static_cast<double>(n) + mu;
  const Complex T = root * (root - other) * m * (m - 1.0);
  const Complex P = p.alpha + p.epsilon * (m - 4.0 + 1.0 - p.gamma);
  return {T, P};
}

}  // namespace bcheun::frobenius
