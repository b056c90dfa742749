#include "bcheun/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace bcheun {

Polynomial Polynomial::monomial(Complex coeff, int power) {
  std::vector<Complex> c(static_cast<std::size_t>(power) + 1, Complex{0.0});
  c.back() = coeff;
  return Polynomial(std::move(c));
}

int Polynomial::degree() const {
  for (int k = static_cast<int>(c_.size()) - 1; k >= 0; --k) {
    if (c_[static_cast<std::size_t>(k)] != Complex{0.0}) return k;
  }
  return -1;
}

Complex Polynomial::operator[](int k) const {
  if (k < 0 || k >= static_cast<int>(c_.size())) return Complex{0.0};
  return c_[static_cast<std::size_t>(k)];
}

Complex Polynomial::leading() const {
  const int d = degree();
  return d < 0 ? Complex{0.0} : c_[static_cast<std::size_t>(d)];
}

double Polynomial::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& v : c_) m = std::max(m, std::abs(v));
  return m;
}

Complex Polynomial::operator()(Complex z) const {
  Complex acc{0.0};
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial{};
  std::vector<Complex> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
  return Polynomial(std::move(d));
}

Polynomial Polynomial::taylor_shift(Complex center) const {
  // Repeated synthetic division: after pass k, slot k holds the k-th Taylor coefficient.
  std::vector<Complex> a = c_;
  const std::size_t n = a.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    for (std::size_t j = n - 1; j > k; --j) a[j - 1] += center * a[j];
  }
  return Polynomial(std::move(a));
}

Polynomial Polynomial::divide_by_root(Complex root, Complex& remainder) const {
  const int d = degree();
  if (d <= 0) {
    remainder = d < 0 ? Complex{0.0} : c_[0];
    return Polynomial{};
  }
  std::vector<Complex> q(static_cast<std::size_t>(d));
  Complex carry = c_[static_cast<std::size_t>(d)];
  for (int k = d - 1; k >= 0; --k) {
    q[static_cast<std::size_t>(k)] = carry;
    carry = c_[static_cast<std::size_t>(k)] + root * carry;
  }
  remainder = carry;
  return Polynomial(std::move(q));
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  if (rhs.c_.size() > c_.size()) c_.resize(rhs.c_.size(), Complex{0.0});
  for (std::size_t k = 0; k < rhs.c_.size(); ++k) c_[k] += rhs.c_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  if (rhs.c_.size() > c_.size()) c_.resize(rhs.c_.size(), Complex{0.0});
  for (std::size_t k = 0; k < rhs.c_.size(); ++k) c_[k] -= rhs.c_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(Complex s) {
  for (auto& v : c_) v *= s;
  trim();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.c_.empty() || b.c_.empty()) return Polynomial{};
  std::vector<Complex> r(a.c_.size() + b.c_.size() - 1, Complex{0.0});
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
  Polynomial p(std::move(r));
  p.trim();
  return p;
}

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == Complex{0.0}) c_.pop_back();
}

}  // namespace bcheun
