#include "bcheun/expansions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bcheun/errors.hpp"

namespace bcheun::expansions {

namespace {

using frobenius::OdeKind;

// Lookahead coefficients beyond the truncation order, used only for the tail estimate.
constexpr int kLookahead = 2;
constexpr double kTailTol = 1e-10;
constexpr double kRoundingTol = 1e-8;

void require(bool ok, ErrorCode code, const char* what) {
  if (!ok) throw Error(code, what);
}

void require_main_path(const BcHeunParams& p) {
  require(p.alpha != 0.0, ErrorCode::AlphaZero, "expansion needs alpha != 0");
  require(p.q != 0.0, ErrorCode::QZero, "expansion needs q != 0");
}

// x^{-a} B(a, b; x) for b = 1 .. bmax by the upward recurrence
// (a+b) B*(a,b+1) = b B*(a,b) + (1-x)^b, starting from B*(a,1) = 1/a.
// Stable for |1 - x| < 1 and free of the cancellation a direct series suffers at large b.
std::vector<Complex> beta_ladder(Complex a, Complex x, int bmax) {
  if (special::is_nonpositive_integer(a))
    throw Error(ErrorCode::BetaParameterPole, "incomplete Beta with non-positive integer first parameter");
  std::vector<Complex> out(static_cast<std::size_t>(bmax) + 1, 0.0);
  out[1] = 1.0 / a;
  const Complex y = 1.0 - x;
  Complex yb = y;
  for (int b = 1; b < bmax; ++b) {
    out[static_cast<std::size_t>(b) + 1] = (static_cast<double>(b) * out[static_cast<std::size_t>(b)] + yb) /
                                           (a + static_cast<double>(b));
    yb *= y;
  }
  return out;
}

int integer_mu(Complex mu) {
  if (!special::is_integer(mu, 1e-10))
    throw Error(ErrorCode::UnsupportedParameters, "Beta resummation needs an integer exponent");
  return static_cast<int>(std::lround(mu.real()));
}

Complex ipow(Complex z, int m) {
  Complex r = 1.0;
  for (int i = 0; i < m; ++i) r *= z;
  return r;
}

double tail_of(const std::vector<Complex>& terms, int N) {
  double mx = 0.0;
  for (int n = 0; n <= N; ++n) mx = std::max(mx, std::abs(terms[static_cast<std::size_t>(n)]));
  if (mx == 0.0) return 0.0;
  double t = 0.0;
  for (std::size_t n = static_cast<std::size_t>(N) + 1; n < terms.size(); ++n) t = std::max(t, std::abs(terms[n]));
  return t / mx;
}

double max_abs(const std::vector<Complex>& v, int N) {
  double m = 0.0;
  for (int n = 0; n <= N && n < static_cast<int>(v.size()); ++n) m = std::max(m, std::abs(v[static_cast<std::size_t>(n)]));
  return m;
}

Complex sum_to(const std::vector<Complex>& v, int N) {
  Complex s = 0.0;
  for (int n = 0; n <= N; ++n) s += v[static_cast<std::size_t>(n)];
  return s;
}

ExpansionSolution finish(ExpansionSolution sol, const frobenius::LocalOde& ode, Complex mu, int N) {
  auto full = frobenius::frobenius_coeffs(ode, sol.center, mu, N + kLookahead);
  sol.series = full;
  sol.N = N;
  sol.branch_ref = sol.z_ref;
  sol.options = special::SeriesOptions::from_environment();
  const auto& p = sol.params;
  sol.ref_parts = sol.parts(sol.z_ref);
  const auto& rp = sol.ref_parts;
  const Complex zr = sol.z_ref;
  switch (sol.kind) {
    case ExpansionKind::BETA_SINGLE:
      sol.c0 = recover_u_from_v(p, VKind::Z_GAMMA, rp.v, rp.dv, zr, sol.branch_ref) - rp.u_sum;
      break;
    case ExpansionKind::GAMMA_DELTA:
      sol.c0 = recover_u_from_v(p, VKind::EXP_DELTA, rp.v, rp.dv, zr, sol.branch_ref) - rp.u_sum;
      break;
    case ExpansionKind::GAMMA_EPS:
      sol.c0 = recover_u_from_v(p, VKind::EXP_EPS, rp.v, rp.dv, zr, sol.branch_ref) - rp.u_sum;
      break;
    case ExpansionKind::BETA_DOUBLE: {
      const Complex v = recover_v_from_w(p, rp.v, rp.dv, zr, sol.branch_ref);
      sol.c1 = v - rp.du_sum;
      const Complex u = recover_u_from_v(p, VKind::DERIVATIVE, v, rp.d2u, zr);
      sol.c0 = u - sol.c1 * zr - rp.u_sum;
      break;
    }
  }
  return sol;
}

}  // namespace

std::string_view to_string(ExpansionKind kind) {
  switch (kind) {
    case ExpansionKind::BETA_SINGLE: return "beta_single";
    case ExpansionKind::BETA_DOUBLE: return "beta_double";
    case ExpansionKind::GAMMA_DELTA: return "gamma_delta";
    case ExpansionKind::GAMMA_EPS: return "gamma_eps";
  }
  return "?";
}

std::optional<ExpansionKind> parse_kind(std::string_view name) {
  for (auto k : {ExpansionKind::BETA_SINGLE, ExpansionKind::BETA_DOUBLE, ExpansionKind::GAMMA_DELTA,
                 ExpansionKind::GAMMA_EPS})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

bool ExpansionSolution::in_region(Complex z) const {
  switch (kind) {
    case ExpansionKind::BETA_SINGLE: return std::abs(z) <= radius * (1.0 + 1e-12);
    case ExpansionKind::GAMMA_DELTA:
    case ExpansionKind::GAMMA_EPS: return std::abs(z) < radius;
    case ExpansionKind::BETA_DOUBLE: return std::abs(z - center) < radius;
  }
  return false;
}

ExpansionSolution::Parts ExpansionSolution::parts(Complex z) const {
  if (z == 0.0) throw Error(ErrorCode::OriginSingular, "expansions are not evaluated at z = 0");
  const auto& a = series.coeffs;
  const int M = static_cast<int>(a.size()) - 1;
  const Complex g = params.gamma;
  Parts P;
  P.u_terms.resize(a.size());
  P.v_terms.resize(a.size());

  switch (kind) {
    case ExpansionKind::BETA_SINGLE: {
      const int mu = integer_mu(series.mu);
      const Complex t = z - center;
      const Complex pw = branch_pow(z, 1.0 - g, branch_ref);
      const Complex zmg = pw / z;
      const auto B = beta_ladder(1.0 - g, z / center, M + mu + 1);
      Complex w = ipow(-center, mu);
      Complex tm = ipow(t, mu);
      Complex v = 0.0, dv = 0.0;
      for (int n = 0; n <= M; ++n) {
        const int m = n + mu;
        const Complex an = a[static_cast<std::size_t>(n)];
        P.u_terms[static_cast<std::size_t>(n)] = an * pw * w * B[static_cast<std::size_t>(m) + 1];
        P.v_terms[static_cast<std::size_t>(n)] = an * tm;
        if (n <= N) {
          v += an * tm;
          if (m > 0) dv += an * static_cast<double>(m) * ipow(t, m - 1);
        }
        w *= -center;
        tm *= t;
      }
      P.u_sum = sum_to(P.u_terms, N);
      P.v = v;
      P.dv = dv;
      P.du = zmg * v;
      P.d2u = zmg * (dv - g * v / z);
      break;
    }
    case ExpansionKind::BETA_DOUBLE: {
      const int mu = integer_mu(series.mu);
      const Complex t = z - center;
      const Complex pw = branch_pow(z, 1.0 - g, branch_ref);
      const Complex zmg = pw / z;
      const Complex x = z / center;
      const auto Bm = beta_ladder(-g, x, M + mu + 1);
      const auto B1 = beta_ladder(1.0 - g, x, M + mu + 1);
      P.du_terms.resize(a.size());
      Complex wgt = ipow(-center, mu);
      Complex tm = ipow(t, mu);
      Complex w = 0.0, dw = 0.0;
      for (int n = 0; n <= M; ++n) {
        const int m = n + mu;
        const auto bi = static_cast<std::size_t>(m) + 1;
        const Complex an = a[static_cast<std::size_t>(n)];
        P.du_terms[static_cast<std::size_t>(n)] = an * zmg * wgt * Bm[bi];
        P.u_terms[static_cast<std::size_t>(n)] = an * pw * wgt * (Bm[bi] - B1[bi]);
        P.v_terms[static_cast<std::size_t>(n)] = an * tm;
        if (n <= N) {
          w += an * tm;
          if (m > 0) dw += an * static_cast<double>(m) * ipow(t, m - 1);
        }
        wgt *= -center;
        tm *= t;
      }
      P.u_sum = sum_to(P.u_terms, N);
      P.du_sum = sum_to(P.du_terms, N);
      P.v = w;
      P.dv = dw;
      P.du = P.du_sum;  // plus c1
      P.d2u = zmg / z * w;
      break;
    }
    case ExpansionKind::GAMMA_DELTA:
    case ExpansionKind::GAMMA_EPS: {
      const bool is_delta = kind == ExpansionKind::GAMMA_DELTA;
      const Complex mu = series.mu;
      const Complex zmg = branch_pow(z, mu - g, branch_ref);  // z^{mu - gamma}
      const Complex zmu = branch_pow(z, mu, branch_ref);
      const Complex arg = is_delta ? params.delta * z : 0.5 * params.epsilon * z * z;
      const Complex E = std::exp(-arg);
      Complex zn = 1.0, poly = 0.0, dpoly = 0.0;
      Complex zs = zmg * z;  // z^{s} for n = 0
      for (int n = 0; n <= M; ++n) {
        const Complex cn = a[static_cast<std::size_t>(n)];
        const Complex s = static_cast<double>(n) + mu + 1.0 - g;
        if (special::is_nonpositive_integer(s))
          throw Error(ErrorCode::GammaParameterPole, "incomplete Gamma parameter at a pole");
        Complex term;
        if (is_delta) {
          term = cn * zs * special::inc_gamma_lower_scaled(s, arg, options).value;
        } else {
          term = cn * 0.5 * zs * special::inc_gamma_lower_scaled(0.5 * s, arg, options).value;
        }
        P.u_terms[static_cast<std::size_t>(n)] = term;
        P.v_terms[static_cast<std::size_t>(n)] = cn * zn;
        if (n <= N) {
          poly += cn * zn;
          if (n > 0) dpoly += cn * static_cast<double>(n) * zn / z;
        }
        zn *= z;
        zs *= z;
      }
      P.u_sum = sum_to(P.u_terms, N);
      P.v = zmu * poly;
      P.dv = zmu * (dpoly + mu * poly / z);
      const Complex drift = is_delta ? params.delta : params.epsilon * z;
      P.du = E * zmg * poly;
      P.d2u = E * zmg * (dpoly + (mu - g) * poly / z - drift * poly);
      break;
    }
  }
  return P;
}

EvalResult ExpansionSolution::evaluate(Complex z, bool allow_outside) const {
  if (z == 0.0) throw Error(ErrorCode::OriginSingular, "expansions are not evaluated at z = 0");
  if (!allow_outside && !in_region(z)) throw Error(ErrorCode::OutsideRegion, "outside validity region");
  const Parts P = parts(z);
  EvalResult r;
  r.terms_used = N + 1;
  r.jet.u = c0 + P.u_sum;
  r.jet.du = P.du;
  r.jet.d2u = P.d2u;
  if (kind == ExpansionKind::BETA_DOUBLE) {
    r.jet.u += c1 * z;
    r.jet.du += c1;
  }
  r.ratio = std::abs(z - (kind == ExpansionKind::GAMMA_DELTA || kind == ExpansionKind::GAMMA_EPS ? 0.0 : center)) /
            radius;

  // Increments of the recovered solution are the term differences against z_ref.
  std::vector<Complex> du(P.u_terms.size());
  for (std::size_t n = 0; n < du.size(); ++n) du[n] = P.u_terms[n] - ref_parts.u_terms[n];
  if (kind == ExpansionKind::BETA_DOUBLE) {
    // The second integral also carries the first one's value at z_ref as a linear term.
    for (std::size_t n = 0; n < du.size(); ++n) du[n] -= (z - z_ref) * ref_parts.du_terms[n];
  }
  r.tail = std::max(tail_of(du, N), tail_of(P.v_terms, N));
  double big = std::max(max_abs(P.u_terms, N), std::abs(c0));
  double val = std::abs(r.jet.u);
  if (kind == ExpansionKind::BETA_DOUBLE) {
    std::vector<Complex> dd(P.du_terms.size());
    for (std::size_t n = 0; n < dd.size(); ++n) dd[n] = P.du_terms[n] - ref_parts.du_terms[n];
    r.tail = std::max(r.tail, tail_of(dd, N));
    big = std::max({big, max_abs(P.du_terms, N), std::abs(c1 * z)});
    val = std::min(val, std::abs(r.jet.du) * std::abs(z));
  }
  r.rounding = std::numeric_limits<double>::epsilon() * big / std::max(val, 1e-300);
  r.converged = r.ratio < 1.0 && r.tail <= kTailTol && r.rounding <= kRoundingTol;
  return r;
}

ExpansionSolution expand_beta_single(const BcHeunParams& p, int N) {
  require_main_path(p);
  require(p.epsilon != 0.0, ErrorCode::EpsilonZero, "expansion needs epsilon != 0");
  if (special::is_nonpositive_integer(1.0 - p.gamma))
    throw Error(ErrorCode::BetaParameterPole, "1 - gamma is a non-positive integer");
  const auto ode = frobenius::build_local_ode(OdeKind::AUX_V12, p);
  ExpansionSolution sol;
  sol.kind = ExpansionKind::BETA_SINGLE;
  sol.params = p;
  sol.center = p.q / p.alpha;
  sol.radius = std::abs(sol.center);
  sol.z_ref = 0.5 * sol.center;
  sol.valid_region = "|z| <= |z0|, geometric convergence for |z - z0| < |z0|";
  return finish(std::move(sol), ode, 2.0, N);
}

ExpansionSolution expand_beta_double(const BcHeunParams& p, int N, RootChoice root) {
  require_main_path(p);
  require(p.epsilon != 0.0, ErrorCode::EpsilonZero, "expansion needs epsilon != 0");
  require(p.alpha + p.epsilon != 0.0, ErrorCode::AlphaPlusEpsZero, "expansion needs alpha + epsilon != 0");
  if (special::is_nonpositive_integer(-p.gamma) || special::is_nonpositive_integer(1.0 - p.gamma))
    throw Error(ErrorCode::BetaParameterPole, "-gamma or 1 - gamma is a non-positive integer");
  const auto s = singular_structure(p);
  ExpansionSolution sol;
  sol.kind = ExpansionKind::BETA_DOUBLE;
  sol.params = p;
  sol.center = root == RootChoice::Z1 ? s.z1 : s.z2;
  sol.other_root = root == RootChoice::Z1 ? s.z2 : s.z1;
  const double zs = std::max(1.0, std::abs(s.z0));
  if (std::abs(sol.center) <= 1e-12 * zs) throw Error(ErrorCode::RootAtOriginChosen, "chosen root is z = 0");
  const auto ode = frobenius::build_local_ode(OdeKind::AUX_W23, p);
  double rho = std::abs(sol.center);
  if (!s.degenerate) rho = std::min(rho, std::abs(sol.center - sol.other_root));
  sol.radius = rho;
  sol.valid_region = "|z - z_c| < min(|z_c|, |z_c - z_other|)";

  // Reference point inside the disk, clear of z0, the other root and the origin.
  const Complex dir = sol.center / std::abs(sol.center);
  const std::array<Complex, 5> picks = {Complex{0.5, 0.0}, Complex{0.45, 0.0}, Complex{0.55, 0.0},
                                        std::polar(0.5, 0.5), std::polar(0.5, -0.5)};
  sol.z_ref = sol.center - picks[0] * rho * dir;
  for (const auto& f : picks) {
    const Complex c = sol.center - f * rho * dir;
    const double clear = std::min({std::abs(c - s.z0), std::abs(c - sol.other_root), std::abs(c)});
    if (clear >= 0.2 * rho) {
      sol.z_ref = c;
      break;
    }
  }
  const Complex mu = frobenius::indicial_exponents(ode, sol.center).first;
  return finish(std::move(sol), ode, mu, N);
}

namespace {

ExpansionSolution expand_gamma(ExpansionKind kind, const BcHeunParams& p, int N) {
  require_main_path(p);
  const auto ode =
      frobenius::build_local_ode(kind == ExpansionKind::GAMMA_DELTA ? OdeKind::AUX_GAMMA34 : OdeKind::AUX_GAMMA38, p);
  ExpansionSolution sol;
  sol.kind = kind;
  sol.params = p;
  sol.center = 0.0;
  sol.radius = std::abs(p.q / p.alpha);
  sol.z_ref = 0.5 * p.q / p.alpha;
  sol.valid_region = "|z| < |z0|";
  const Complex mu = frobenius::indicial_exponents(ode, 0.0).first;
  return finish(std::move(sol), ode, mu, N);
}

}  // namespace

ExpansionSolution expand_gamma_delta(const BcHeunParams& p, int N) {
  require(p.delta != 0.0, ErrorCode::DeltaZero, "expansion needs delta != 0");
  return expand_gamma(ExpansionKind::GAMMA_DELTA, p, N);
}

ExpansionSolution expand_gamma_eps(const BcHeunParams& p, int N) {
  require(p.epsilon != 0.0, ErrorCode::EpsilonZero, "expansion needs epsilon != 0");
  return expand_gamma(ExpansionKind::GAMMA_EPS, p, N);
}

ExpansionSolution expand(ExpansionKind kind, const BcHeunParams& p, int N, RootChoice root) {
  switch (kind) {
    case ExpansionKind::BETA_SINGLE: return expand_beta_single(p, N);
    case ExpansionKind::BETA_DOUBLE: return expand_beta_double(p, N, root);
    case ExpansionKind::GAMMA_DELTA: return expand_gamma_delta(p, N);
    case ExpansionKind::GAMMA_EPS: return expand_gamma_eps(p, N);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown expansion kind");
}

Complex recover_u_from_v(const BcHeunParams& p, VKind kind, Complex v, Complex v1, Complex z, Complex ref) {
  require(z != 0.0, ErrorCode::OriginSingular, "recover_u_from_v at z = 0");
  const Complex d = p.alpha * z - p.q;
  if (std::abs(d) <= 1e-14 * (std::abs(p.alpha * z) + std::abs(p.q)))
    throw Error(ErrorCode::AtExtraSingularity, "alpha z - q vanishes");
  Complex u1, u2;
  if (kind == VKind::DERIVATIVE) {
    u1 = v;
    u2 = v1;
  } else {
    const Complex zmg = branch_pow(z, -p.gamma, ref);
    Complex f = 1.0, drift = p.gamma / z;
    if (kind == VKind::EXP_DELTA) {
      f = std::exp(-p.delta * z);
      drift += p.delta;
    } else if (kind == VKind::EXP_EPS) {
      f = std::exp(-0.5 * p.epsilon * z * z);
      drift += p.epsilon * z;
    }
    u1 = f * zmg * v;
    u2 = f * zmg * (v1 - drift * v);
  }
  return -z / d * (u2 + (p.gamma / z + p.delta + p.epsilon * z) * u1);
}

Complex recover_v_from_w(const BcHeunParams& p, Complex w, Complex w1, Complex z, Complex ref) {
  require(z != 0.0, ErrorCode::OriginSingular, "recover_v_from_w at z = 0");
  const Complex d = p.alpha * z - p.q;
  if (std::abs(d) <= 1e-14 * (std::abs(p.alpha * z) + std::abs(p.q)))
    throw Error(ErrorCode::AtExtraSingularity, "alpha z - q vanishes");
  const Complex t1 = (p.alpha + p.epsilon) * z * (p.alpha * z - 2.0 * p.q);
  const Complex t0 = p.q * p.q - p.delta * p.q - p.alpha * p.gamma;
  const Complex num = t1 + t0;
  if (std::abs(num) <= 1e-12 * (std::abs(t1) + std::abs(t0)))
    throw Error(ErrorCode::AtAuxRoot, "z is a root of the auxiliary quadratic");
  const Complex k = 1.0 + p.gamma;
  const Complex zk = branch_pow(z, -k, ref);
  const Complex v1 = zk * w;
  const Complex v2 = zk * (w1 - k * w / z);
  return -z * d / num * (v2 + (k / z + p.delta + p.epsilon * z - p.alpha / d) * v1);
}

TerminationResult check_termination(const BcHeunParams& p, ExpansionKind kind, int N, RootChoice root) {
  if (kind != ExpansionKind::BETA_SINGLE && kind != ExpansionKind::BETA_DOUBLE)
    throw Error(ErrorCode::InvalidArgument, "termination is defined for the Beta expansions");
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "negative order");
  require_main_path(p);
  TerminationResult res;
  auto& cert = res.certificate;
  cert.N = N;
  cert.params = p;

  frobenius::LocalOde ode;
  Complex center;
  if (kind == ExpansionKind::BETA_SINGLE) {
    ode = frobenius::build_local_ode(OdeKind::AUX_V12, p);
    center = p.q / p.alpha;
    cert.mu = 2.0;
  } else {
    const auto s = singular_structure(p);
    ode = frobenius::build_local_ode(OdeKind::AUX_W23, p);
    center = root == RootChoice::Z1 ? s.z1 : s.z2;
    cert.mu = frobenius::indicial_exponents(ode, center).first;
  }
  const auto fs = frobenius::frobenius_coeffs(ode, center, cert.mu, N + 3);
  double amax = 0.0;
  for (int n = 0; n <= N; ++n) amax = std::max(amax, std::abs(fs.coeffs[static_cast<std::size_t>(n)]));
  for (int k = 1; k <= 3; ++k) cert.tail_norms.push_back(std::abs(fs.coeffs[static_cast<std::size_t>(N + k)]) / amax);

  const Complex shift = static_cast<double>(N) + cert.mu + 1.0 - p.gamma;
  cert.p_n = p.alpha + p.epsilon * shift;
  if (std::abs(cert.p_n) > 1e-10 * (std::abs(p.alpha) + std::abs(p.epsilon * shift))) {
    res.reason = "P_N does not vanish";
    return res;
  }
  const int needed = fs.band - 2;
  for (int k = 0; k < needed; ++k) {
    if (cert.tail_norms[static_cast<std::size_t>(k)] > kTailTol) {
      res.reason = "trailing coefficient a_{N+" + std::to_string(k + 1) + "} does not vanish";
      return res;
    }
  }
  const auto sol = expand(kind, p, N, root);
  const double r = 0.5 * std::abs(p.q / p.alpha);
  const Complex dir = p.q / p.alpha / std::abs(p.q / p.alpha);
  double worst = 0.0;
  for (int j = 0; j < 16; ++j) {
    const Complex z = r * dir * std::polar(1.0, 2.0 * std::numbers::pi * j / 16.0);
    const auto e = sol.evaluate(z, true);
    worst = std::max(worst, residual(p, z, e.jet).relative);
  }
  cert.global_residual = worst;
  if (worst > 1e-8) {
    res.reason = "finite sum fails the residual check";
    return res;
  }
  res.terminates = true;
  res.reason = "terminating";
  return res;
}

TerminatingSearch find_terminating_params(Complex gamma, Complex epsilon, int N, Complex seed_q, Complex seed_delta,
                                          int max_iter) {
  TerminatingSearch out;
  if (epsilon == 0.0) throw Error(ErrorCode::EpsilonZero, "termination search needs epsilon != 0");
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "termination search needs N >= 1");
  const Complex alpha = -epsilon * (static_cast<double>(N) + 3.0 - gamma);
  auto params = [&](Complex q, Complex delta) { return BcHeunParams{gamma, delta, epsilon, alpha, q}; };
  using Vec = std::array<Complex, 2>;
  auto F = [&](const Vec& x, Vec& f) {
    try {
      const auto p = params(x[0], x[1]);
      const auto ode = frobenius::build_local_ode(OdeKind::AUX_V12, p);
      const auto fs = frobenius::frobenius_coeffs(ode, p.q / p.alpha, 2.0, N + 2);
      f = {fs.coeffs[static_cast<std::size_t>(N) + 1], fs.coeffs[static_cast<std::size_t>(N) + 2]};
      return std::isfinite(std::abs(f[0])) && std::isfinite(std::abs(f[1]));
    } catch (const Error&) {
      return false;
    }
  };
  auto norm = [](const Vec& f) { return std::hypot(std::abs(f[0]), std::abs(f[1])); };

  Vec x{seed_q, seed_delta}, f;
  if (!F(x, f)) {
    out.reason = "seed is not admissible";
    return out;
  }
  double fn = norm(f);
  int nudges = 0;
  for (int it = 1; it <= max_iter; ++it) {
    out.iterations = it;
    if (fn <= 1e-15) break;
    std::array<Vec, 2> J;  // J[col][row]
    for (int j = 0; j < 2; ++j) {
      Vec xp = x, fp;
      const double h = 1e-7 * std::max(1.0, std::abs(x[static_cast<std::size_t>(j)]));
      xp[static_cast<std::size_t>(j)] += h;
      if (!F(xp, fp)) {
        out.reason = "Jacobian evaluation failed";
        return out;
      }
      J[static_cast<std::size_t>(j)] = {(fp[0] - f[0]) / h, (fp[1] - f[1]) / h};
    }
    const Complex det = J[0][0] * J[1][1] - J[1][0] * J[0][1];
    const double jscale = std::abs(J[0][0] * J[1][1]) + std::abs(J[1][0] * J[0][1]);
    bool stalled = std::abs(det) <= 1e-14 * jscale || det == 0.0;
    double lambda = 1.0;
    if (!stalled) {
      const Vec dx{-(J[1][1] * f[0] - J[1][0] * f[1]) / det, -(-J[0][1] * f[0] + J[0][0] * f[1]) / det};
      bool accepted = false;
      for (int h = 0; h < 40; ++h, lambda *= 0.5) {
        Vec xn{x[0] + lambda * dx[0], x[1] + lambda * dx[1]}, fnew;
        if (F(xn, fnew) && norm(fnew) < fn) {
          x = xn;
          f = fnew;
          fn = norm(fnew);
          accepted = true;
          break;
        }
      }
      const double step = lambda * std::hypot(std::abs(dx[0]), std::abs(dx[1]));
      if (fn <= 1e-13 && (!accepted || step <= 1e-15 * (1.0 + std::hypot(std::abs(x[0]), std::abs(x[1])))))
        break;
      stalled = !accepted || lambda < 1e-3;
    }
    if (stalled) {
      // Real data keep Newton on the real plane, where |F| can bottom out at a fold with a
      // singular Jacobian while the roots sit off the axis as conjugate pairs. A small
      // imaginary offset lets the iteration leave the fold.
      if (++nudges > 5) {
        out.reason = "Newton stalled";
        break;
      }
      for (auto& xi : x) xi += Complex{0.0, 1e-2 * std::max(1.0, std::abs(xi))};
      if (!F(x, f)) {
        out.reason = "nudged point is not admissible";
        return out;
      }
      fn = norm(f);
    }
  }
  out.final_norm = fn;
  out.params = params(x[0], x[1]);
  const auto cert = check_termination(out.params, ExpansionKind::BETA_SINGLE, N);
  out.found = cert.terminates;
  out.reason = out.found ? "converged" : "no root: " + cert.reason;
  return out;
}

bool special_conditions_hold(const BcHeunParams& p) {
  const bool c1 = std::abs(p.alpha + p.epsilon) <= 1e-10 * (std::abs(p.alpha) + std::abs(p.epsilon));
  const Complex k = p.q * p.q - p.delta * p.q - p.alpha * p.gamma;
  const double ks = std::norm(p.q) + std::abs(p.delta * p.q) + std::abs(p.alpha * p.gamma);
  return c1 && std::abs(k) <= 1e-10 * ks;
}

Jet quadrature_special(const BcHeunParams& p, Complex z, Complex c1, Complex c2, std::optional<Complex> base) {
  if (!special_conditions_hold(p))
    throw Error(ErrorCode::ConditionsNotMet, "needs alpha + eps = 0 and q^2 - delta q - alpha gamma = 0");
  require(z != 0.0, ErrorCode::OriginSingular, "quadrature solution at z = 0");
  const Complex d = p.alpha * z - p.q;
  if (std::abs(d) <= 1e-14 * (std::abs(p.alpha * z) + std::abs(p.q)))
    throw Error(ErrorCode::AtExtraSingularity, "alpha z - q vanishes");
  const Complex zb = base ? *base : (p.alpha != 0.0 ? 0.5 * p.q / p.alpha : Complex{1.0});
  // z^{-gamma} continued along the straight path from the principal value at zb.
  auto E = [&](Complex t) {
    return std::exp(-p.delta * t - 0.5 * p.epsilon * t * t) * branch_pow(t, -p.gamma, zb);
  };
  Complex I = 0.0;
  if (c1 != 0.0) {
    const Complex dz = z - zb;
    {
      const double len2 = std::norm(dz);
      const double s = len2 > 0.0 ? std::clamp(std::real(-zb * std::conj(dz)) / len2, 0.0, 1.0) : 0.0;
      if (std::abs(zb + s * dz) < 1e-3 * std::max(std::abs(zb), std::abs(z)))
        throw Error(ErrorCode::PathTooCloseToSingularity, "quadrature path passes near z = 0");
    }
    auto f = [&](double s) {
      const Complex t = zb + s * dz;
      return E(t) * (p.alpha * t - p.q) / t * dz;
    };
    I = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, 1.0, 20, 1e-13);
  }
  const Complex n = p.gamma + p.delta * z + p.epsilon * z * z;
  const Complex h = n / d;
  const Complex h1 = ((p.delta + 2.0 * p.epsilon * z) * d - p.alpha * n) / (d * d);
  const Complex h2 = 2.0 * p.epsilon / d - 2.0 * p.alpha * h1 / d;
  const Complex K = c2 + c1 * I;
  const Complex ez = E(z);
  return {c1 * ez + h * K, h1 * K, h2 * K + h1 * c1 * ez * d / z};
}

}  // namespace bcheun::expansions
