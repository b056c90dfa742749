#pragma once

#include <array>
#include <complex>
#include <string_view>
#include <utility>
#include <vector>

#include "bcheun/model.hpp"
#include "bcheun/polynomial.hpp"

namespace bcheun::frobenius {

enum class OdeKind { BHE, AUX_V12, AUX_V22, AUX_W23, AUX_GAMMA34, AUX_GAMMA38 };

std::string_view to_string(OdeKind kind);

/// A v'' + B v' + C v = 0 with polynomial coefficients. Auxiliary operators are scaled
/// so that A is monic; its roots are listed in `singular_points`.
struct LocalOde {
  OdeKind kind = OdeKind::BHE;
  Polynomial A;
  Polynomial B;
  Polynomial C;
  std::vector<Complex> singular_points;
};

LocalOde build_local_ode(OdeKind kind, const BcHeunParams& p);

/// Sorted by real part, larger first.
std::pair<Complex, Complex> indicial_exponents(const LocalOde& ode, Complex center);

/// One balance equation: sum_k coeff_k * a_{n-k} = 0, with `terms[k] = {k, coeff_k}`.
struct RecurrenceBand {
  int n = 0;
  std::vector<std::pair<int, Complex>> terms;
  // Sum of the absolute contributions making up each coefficient; scale for relative errors.
  std::vector<double> magnitudes;

  Complex operator[](int offset) const;
};

/// The operator re-expanded about `center`, ready to emit bands for any (mu, n).
class ShiftedOde {
 public:
  ShiftedOde(const LocalOde& ode, Complex center);

  int multiplicity() const { return s_; }
  int width() const { return width_; }
  Complex center() const { return center_; }
  const Polynomial& A() const { return A_; }
  const Polynomial& B() const { return B_; }
  const Polynomial& C() const { return C_; }

  /// Coefficients of the indicial quadratic c2 mu^2 + c1 mu + c0.
  std::array<Complex, 3> indicial() const;
  Complex indicial_at(Complex mu) const;
  std::pair<Complex, Complex> exponents() const;

  RecurrenceBand band(Complex mu, int n) const;

 private:
  Complex center_;
  Polynomial A_, B_, C_;
  int s_ = 0;
  int width_ = 1;
};

RecurrenceBand synthesize_recurrence(const LocalOde& ode, Complex center, Complex mu, int n);

struct FrobeniusSeries {
  Complex center;
  Complex mu;
  std::vector<Complex> coeffs;
  int band = 0;

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// a_0 = 1 and the forward recurrence up to a_N.
FrobeniusSeries frobenius_coeffs(const LocalOde& ode, Complex center, Complex mu, int N);

/// The printed four-term recurrence at z0 for the v = z^gamma u' operator:
/// S_n, R_{n-1}, Q_{n-2}, P_{n-3} as the coefficients of a_n .. a_{n-3}.
RecurrenceBand closed_form_band_E1(const BcHeunParams& p, Complex mu, int n);

/// Edge slots of band n in the printed five-term recurrence at a root z_r of the
/// w = z^(1+gamma) v' operator: T_n = z_r (z_r - z_o)(n+mu)(n+mu-1) multiplying a_n, and
/// P_{n-4} with P_m = alpha + eps (m+mu+1-gamma) multiplying a_{n-4}.
std::pair<Complex, Complex> printed_five_term_edges(const BcHeunParams& p, Complex root, Complex other,
                                                    Complex mu, int n);

}  // namespace bcheun::frobenius
