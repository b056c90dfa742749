#pragma once

#include <complex>

namespace bcheun {
using Complex = std::complex<double>;
}

namespace bcheun::special {

struct SeriesOptions {
  double tol = 1e-15;
  int max_terms = 10000;

  // Honors BCHEUN_MAX_TERMS when set to a positive integer.
  static SeriesOptions from_environment();
};

struct SpecialFnResult {
  Complex value;
  int terms_used = 0;
  bool converged = false;
};

// Principal-branch log Gamma (Lanczos, g = 7). Throws PoleAtParameter at 0, -1, -2, ...
Complex log_gamma(Complex z);
Complex gamma(Complex z);
// 1/Gamma(z), which is entire; exactly zero at the poles of Gamma.
Complex rgamma(Complex z);

bool is_nonpositive_integer(Complex z, double tol = 1e-12);
bool is_integer(Complex z, double tol = 1e-12);

/// B(a,b;x) = int_0^x t^(a-1) (1-t)^(b-1) dt.
SpecialFnResult inc_beta(Complex a, Complex b, Complex x, const SeriesOptions& opt = {});

/// x^(-a) B(a,b;x) by the hypergeometric series; needs |x| < 1. This is entire in x
/// inside the unit disk and carries no branch cut, so callers can attach their own x^a.
SpecialFnResult inc_beta_scaled(Complex a, Complex b, Complex x, const SeriesOptions& opt = {});

/// Upper incomplete Gamma(s;x) = int_x^inf t^(s-1) e^(-t) dt.
SpecialFnResult inc_gamma_upper(Complex s, Complex x, const SeriesOptions& opt = {});

/// x^(-s) gamma(s,x) = e^(-x) sum_k x^k / (s)_(k+1). Entire in x, no branch cut.
SpecialFnResult inc_gamma_lower_scaled(Complex s, Complex x, const SeriesOptions& opt = {});

SpecialFnResult kummer_1f1(Complex a, Complex b, Complex x, const SeriesOptions& opt = {});

/// Connection-formula U(a,b,x); integer b is rejected with IntegerBNotSupported.
SpecialFnResult tricomi_u(Complex a, Complex b, Complex x, const SeriesOptions& opt = {});

}  // namespace bcheun::special
