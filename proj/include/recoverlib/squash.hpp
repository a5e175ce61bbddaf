#ifndef RECOVERLIB_SQUASH_HPP
#define RECOVERLIB_SQUASH_HPP

#include "recoverlib/recopt.hpp"

#include <optional>

namespace recoverlib {

struct GseResult {
  /// -1/2 log2 f_sq_value, in bits.
  double e_value = 0.0;
  double f_sq_value = 0.0;
  /// exact for closed forms; upper (on E, i.e. f is a lower bound on F^sq)
  /// for the heuristic.
  BoundKind bound = BoundKind::upper;
  /// Squashing channel E' -> E acting on the canonical purification.
  std::optional<QuantumChannel> squashing;
  int env_dim = 0;
  /// Recovery E -> A E achieving f_sq_value on the extension.
  std::optional<QuantumChannel> recovery;
  int restarts = 0;
  int iterations = 0;
  bool converged = true;
};

/// Canonical purification sum_k sqrt(lambda_k) |k>_AB |k>_E' of a state on
/// (A, B), eigenvalues descending, cutoff 1e-12 relative.
struct Purified {
  CVector psi;  // index ab * rank + k
  CMatrix basis;
  RVector weights;
  int rank() const { return static_cast<int>(weights.size()); }
};
Purified canonical_purification(const CMatrix& rho_ab);

/// omega on (A, B, E) from a squashing Choi matrix on (E', E).
CMatrix extension_from_squashing(const Purified& p, const CMatrix& squashing_choi, int env_dim);

/// Squashing channel E' -> E whose action on the canonical purification of
/// rho_AB gives the extension omega on (A, B, E).
QuantumChannel squashing_from_extension(const CMatrix& rho_ab, const CMatrix& omega_abe,
                                        int da, int db, int de);

/// F(A;B|E) of an extension omega on (A, B, E), convex backend.
OptResult extension_for(const CMatrix& omega_abe, int da, int db, int de,
                        const sdp::SdpOptions& opts = {});

struct GseOptions {
  /// 0 selects |A| |B|.
  int env_dim = 0;
  int restarts = 5;
  int sweeps = 10;
  std::uint64_t seed = 0;
  double tol = 1e-7;
  /// Optional squashing channel to start from (replaces restart 0).
  std::optional<QuantumChannel> warm_start;
  sdp::SdpOptions sdp;
};

/// Alternates the recovery program and the squashing-channel program on a
/// fixed purification. Every reported value is attained by an explicit
/// extension, so f_sq_value is a lower bound on F^sq.
GseResult gse_heuristic(const MultipartiteState& rho, const Labels& a, const Labels& b,
                        const GseOptions& opts = {});

/// Closed form for pure states: E = -log2 ||phi_A||_inf.
GseResult gse_pure(const MultipartiteState& phi, const Labels& a, const Labels& b);

struct SeparableTerm {
  double weight;
  CVector a;
  CVector b;
};

struct WitnessExtension {
  /// sum_x p(x) psi_x (x) phi_x (x) |x><x| on labels A, B, E.
  MultipartiteState extension;
  /// Measure E, prepare psi_x on A, keep E.
  QuantumChannel recovery;
  /// F(omega_ABE, R(omega_BE)).
  double fidelity = 0.0;
};

WitnessExtension separable_witness_extension(const std::vector<SeparableTerm>& terms);

/// rho_AB of a separable decomposition.
MultipartiteState separable_state(const std::vector<SeparableTerm>& terms);

/// Rank of the canonical purification of gamma on (A A', B B'); the input
/// dimension a squashing channel for private_state_fidelity_cap must have.
int private_purification_rank(const MultipartiteState& gamma);

/// F(A A'; B B' | E) of the extension of a private state produced by the
/// squashing channel (convex backend).
double private_state_fidelity_cap(const MultipartiteState& gamma, const QuantumChannel& squashing,
                                  const sdp::SdpOptions& opts = {});

}  // namespace recoverlib

#endif  // RECOVERLIB_SQUASH_HPP
