#ifndef RECOVERLIB_RECOPT_HPP
#define RECOVERLIB_RECOPT_HPP

#include "recoverlib/channels.hpp"
#include "recoverlib/fidelity_program.hpp"

#include <optional>

namespace recoverlib {

enum class Backend { petz, seesaw, convex };

enum class BoundKind { exact, lower, upper };

std::string to_string(Backend b);
std::string to_string(BoundKind b);
Backend parse_backend(const std::string& s);

struct OptResult {
  double value = 0.0;
  BoundKind bound = BoundKind::lower;
  std::vector<QuantumChannel> certificate;
  /// Value obtained by re-evaluating the certificate from scratch.
  double certificate_value = 0.0;
  int iterations = 0;
  double gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  bool converged = true;
  Backend backend = Backend::convex;
};

struct RecoveryOptions {
  Backend backend = Backend::convex;
  /// Relative-improvement stop for the see-saw.
  double tol = 1e-7;
  int max_iterations = 500;
  sdp::SdpOptions sdp;
};

/// Recovery problem in the internal ordering: target rho on (B, A, C) and
/// rho_BC on (B, C). Empty groups have dimension one.
struct RecoveryProblem {
  CMatrix target;
  CMatrix rho_bc;
  int db = 1;
  int da = 1;
  int dc = 1;
};

RecoveryProblem recovery_problem(const MultipartiteState& s, const Labels& a, const Labels& b,
                                 const Labels& c);

/// sigma(J) = (id_B (x) R)(rho_BC) for a recovery Choi J on (C, A C).
CMatrix recovered_state(const RecoveryProblem& p, const CMatrix& choi);
double recovery_fidelity(const RecoveryProblem& p, const CMatrix& choi);

/// Convex program for sup_R F(target, R(rho_BC)); variables[0] is the Choi.
FidelityOutcome solve_recovery_convex(const RecoveryProblem& p, const sdp::SdpOptions& opts);

/// Projects a nearly-CPTP Choi matrix onto CPTP maps: clamps negative
/// eigenvalues and rescales with (M^{-1/2} (x) I) J (M^{-1/2} (x) I), M = Tr_out J.
CMatrix polish_choi(const CMatrix& choi, int in_dim, int out_dim);

/// Throws SolverError unless the outcome is optimal or within 1e-7 on both
/// gap and feasibility.
void require_converged(const FidelityOutcome& o, const char* what);

/// F(A;B|C) = sup over R_{C->AC} of F(rho_ABC, R(rho_BC)). C and B may be
/// empty.
OptResult fidelity_of_recovery(const MultipartiteState& s, const Labels& a, const Labels& b,
                               const Labels& c, const RecoveryOptions& opts = {});

/// -log2 of the fidelity of recovery; lower bounds on F become upper bounds.
OptResult surprisal_of_recovery(const MultipartiteState& s, const Labels& a, const Labels& b,
                                const Labels& c, const RecoveryOptions& opts = {});

/// sup over states tau_A of F(sigma_AB, tau_A (x) sigma_B).
OptResult fidelity_AB(const MultipartiteState& sigma, const Labels& a, const Labels& b,
                      const RecoveryOptions& opts = {});

struct MultipartiteOptions {
  int sweeps = 20;
  int restarts = 5;
  std::uint64_t seed = 0;
  double tol = 1e-7;
  sdp::SdpOptions sdp;
};

/// sup over R^1,...,R^{l-1} (R^k: C -> A_k C) of
///   F(rho_{A_1...A_l C}, R^1 o ... o R^{l-1}(rho_{A_l C})).
/// Cyclic coordinate ascent; each coordinate step is the convex program.
/// The certificate lists R^1, ..., R^{l-1}.
OptResult multipartite_for(const MultipartiteState& s, const std::vector<Labels>& parts,
                           const Labels& c, const MultipartiteOptions& opts = {});

/// F of the sequential recovery for given Choi matrices (R^1 first in the list).
double multipartite_fidelity(const MultipartiteState& s, const std::vector<Labels>& parts,
                             const Labels& c, const std::vector<CMatrix>& chois);

}  // namespace recoverlib

#endif  // RECOVERLIB_RECOPT_HPP
