#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace bcheun {

using Complex = std::complex<double>;

/// Dense polynomial with complex coefficients, stored in ascending powers.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<Complex> coeffs) : c_(coeffs) {}
  explicit Polynomial(std::vector<Complex> coeffs) : c_(std::move(coeffs)) {}

  static Polynomial monomial(Complex coeff, int power);

  /// Degree after dropping exactly-zero leading coefficients; -1 for the zero polynomial.
  int degree() const;
  bool is_zero() const { return degree() < 0; }

  /// Coefficient of z^k, zero outside the stored range.
  Complex operator[](int k) const;
  const std::vector<Complex>& coeffs() const { return c_; }
  Complex leading() const;
  double max_abs_coeff() const;

  Complex operator()(Complex z) const;  // Horner
  Polynomial derivative() const;

  /// Coefficients of p(center + t) as a polynomial in t.
  Polynomial taylor_shift(Complex center) const;

  /// Synthetic division by (z - root); returns the quotient and stores p(root) in `remainder`.
  Polynomial divide_by_root(Complex root, Complex& remainder) const;

  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(Complex s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, Complex s) { return a *= s; }
  friend Polynomial operator*(Complex s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

 private:
  void trim();
  std::vector<Complex> c_;
};

}  // namespace bcheun
