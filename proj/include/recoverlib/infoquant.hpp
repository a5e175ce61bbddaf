#ifndef RECOVERLIB_INFOQUANT_HPP
#define RECOVERLIB_INFOQUANT_HPP

#include "recoverlib/qcore.hpp"

namespace recoverlib {

// All entropic quantities are in bits.

/// F(P,Q) = ||sqrt(P) sqrt(Q)||_1^2. Throws InputError when either operand
/// has an eigenvalue below -1e-9.
double fidelity(const CMatrix& p, const CMatrix& q);
double root_fidelity(const CMatrix& p, const CMatrix& q);
double fidelity(const MultipartiteState& rho, const MultipartiteState& sigma);

/// ||rho - sigma||_1, in [0, 2] for states.
double trace_distance(const CMatrix& rho, const CMatrix& sigma);
/// sqrt(1 - F).
double purified_distance(const CMatrix& rho, const CMatrix& sigma);

double von_neumann_entropy(const CMatrix& rho);
double von_neumann_entropy(const MultipartiteState& s);
double entropy_of(const MultipartiteState& s, const Labels& group);

/// I(A;B|C) = H(AC) + H(BC) - H(C) - H(ABC); C may be empty.
double cqmi(const MultipartiteState& s, const Labels& a, const Labels& b, const Labels& c);
double mutual_information(const MultipartiteState& s, const Labels& a, const Labels& b);

/// Result of a divergence that may be +infinity (support violation).
struct Divergence {
  double value = 0.0;
  bool infinite = false;
};

/// (1/(alpha-1)) log Tr{rho^alpha sigma^(1-alpha)}.
Divergence renyi_relative_entropy(const CMatrix& rho, const CMatrix& sigma, double alpha);

/// (2 alpha/(alpha-1)) log || sigma^((1-alpha)/(2 alpha)) rho^(1/2) ||_{2 alpha}.
Divergence sandwiched_renyi(const CMatrix& rho, const CMatrix& sigma, double alpha);

/// Tr rho (log rho - log sigma), for the alpha -> 1 checks.
Divergence relative_entropy(const CMatrix& rho, const CMatrix& sigma);

/// H_alpha(A|B) = -D_alpha(rho_AB || I_A (x) rho_B).
Divergence conditional_renyi_entropy(const MultipartiteState& s, const Labels& a,
                                     const Labels& b, double alpha);

struct RenyiCqmi {
  double value = 0.0;
  /// Set when a marginal needed the 1e-12 pseudo-inverse cutoff.
  bool cutoff_engaged = false;
};

/// (1/(alpha-1)) log || rho_ABC^{1/2} rho_AC^{(1-a)/2a} rho_C^{(a-1)/2a}
///                        rho_BC^{(1-a)/2a} ||_{2a}^{2a}.
RenyiCqmi renyi_cqmi(const MultipartiteState& s, const Labels& a, const Labels& b,
                     const Labels& c, double alpha);

double binary_entropy(double eps);

}  // namespace recoverlib

#endif  // RECOVERLIB_INFOQUANT_HPP
