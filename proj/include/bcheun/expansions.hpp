#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bcheun/frobenius.hpp"
#include "bcheun/model.hpp"
#include "bcheun/special_functions.hpp"

namespace bcheun::expansions {

enum class ExpansionKind { BETA_SINGLE, BETA_DOUBLE, GAMMA_DELTA, GAMMA_EPS };
enum class RootChoice { Z1, Z2 };

/// How a helper function v relates to u' (used to solve the BHE for u pointwise):
///   Z_GAMMA    v = z^gamma u'
///   EXP_DELTA  v = e^{delta z} z^gamma u'
///   EXP_EPS    v = e^{eps z^2/2} z^gamma u'
///   DERIVATIVE v = u'
enum class VKind { Z_GAMMA, EXP_DELTA, EXP_EPS, DERIVATIVE };

std::string_view to_string(ExpansionKind kind);
std::optional<ExpansionKind> parse_kind(std::string_view name);

struct EvalResult {
  Jet jet;
  int terms_used = 0;
  bool converged = false;
  // |z - center| / radius; geometric convergence needs < 1.
  double ratio = 0.0;
  // Size of the last two increments relative to the largest one.
  double tail = 0.0;
  // Rounding-level error implied by the largest summand relative to the result.
  double rounding = 0.0;
};

class ExpansionSolution {
 public:
  ExpansionKind kind = ExpansionKind::BETA_SINGLE;
  BcHeunParams params;
  frobenius::FrobeniusSeries series;
  Complex c0;
  Complex c1;
  int N = 0;
  Complex center;
  Complex other_root;  // the unused root for BETA_DOUBLE
  Complex z_ref;       // where the constants were recovered
  Complex branch_ref;  // direction fixing the branch of z^(-gamma)
  double radius = 0.0;
  std::string valid_region;
  special::SeriesOptions options;

  /// Throws OutsideRegion for points outside the stated region unless allow_outside.
  EvalResult evaluate(Complex z, bool allow_outside = false) const;
  bool in_region(Complex z) const;

  // Raw partial sums without the integration constants; exposed for the constant checks.
  struct Parts {
    Complex u_sum;               // sum of integrated terms
    Complex du_sum;              // BETA_DOUBLE: sum of first-integral terms
    Complex du;                  // u' built directly from the local series
    Complex d2u;                 // u''
    Complex v, dv;               // helper function and its derivative (kind-specific)
    std::vector<Complex> u_terms;
    std::vector<Complex> du_terms;
    std::vector<Complex> v_terms;
  };
  Parts parts(Complex z) const;

  Parts ref_parts;  // parts(z_ref), cached at construction
};

ExpansionSolution expand_beta_single(const BcHeunParams& p, int N);
ExpansionSolution expand_beta_double(const BcHeunParams& p, int N, RootChoice root = RootChoice::Z1);
ExpansionSolution expand_gamma_delta(const BcHeunParams& p, int N);
ExpansionSolution expand_gamma_eps(const BcHeunParams& p, int N);
ExpansionSolution expand(ExpansionKind kind, const BcHeunParams& p, int N, RootChoice root = RootChoice::Z1);

/// Solve the BHE for u at z given the helper function v and v'.
Complex recover_u_from_v(const BcHeunParams& p, VKind kind, Complex v, Complex v1, Complex z,
                         Complex ref = 1.0);

/// Solve the v = u' equation for v at z given w = z^(1+gamma) v' and w'.
Complex recover_v_from_w(const BcHeunParams& p, Complex w, Complex w1, Complex z, Complex ref = 1.0);

struct TerminationCertificate {
  int N = 0;
  Complex mu;
  BcHeunParams params;
  Complex p_n;
  std::vector<double> tail_norms;
  double global_residual = 0.0;
};

struct TerminationResult {
  bool terminates = false;
  TerminationCertificate certificate;  // tails are filled in either way
  std::string reason;
};

TerminationResult check_termination(const BcHeunParams& p, ExpansionKind kind, int N,
                                    RootChoice root = RootChoice::Z1);

struct TerminatingSearch {
  bool found = false;
  BcHeunParams params;
  int iterations = 0;
  double final_norm = 0.0;
  std::string reason;
};

TerminatingSearch find_terminating_params(Complex gamma, Complex epsilon, int N, Complex seed_q,
                                          Complex seed_delta, int max_iter = 100);

/// The quadrature solution available when alpha + eps = 0 and q^2 - delta q - alpha gamma = 0:
/// u = c1 E + h (c2 + c1 int_{zb}^z E(t)(alpha t - q)/t dt), E = e^{-delta z - eps z^2/2} z^{-gamma},
/// h = (gamma + delta z + eps z^2)/(alpha z - q). zb defaults to z0/2.
Jet quadrature_special(const BcHeunParams& p, Complex z, Complex c1, Complex c2,
                       std::optional<Complex> base = std::nullopt);

bool special_conditions_hold(const BcHeunParams& p);

}  // namespace bcheun::expansions
