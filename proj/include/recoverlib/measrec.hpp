#ifndef RECOVERLIB_MEASREC_HPP
#define RECOVERLIB_MEASREC_HPP

#include "recoverlib/recopt.hpp"

namespace recoverlib {

enum class DfmBackend { seesaw, ppt_relax };

std::string to_string(DfmBackend b);
DfmBackend parse_dfm_backend(const std::string& s);

struct DfmResult {
  double d_value = 0.0;
  double f_value = 0.0;
  /// Direction refers to D: upper for the see-saw, lower for the PPT
  /// relaxation, exact for PPT on a qubit.
  BoundKind bound = BoundKind::upper;
  /// Measure-and-prepare channel attaining f_value (see-saw and pure forms).
  /// The PPT backend stores its Choi here only when it is exact.
  std::optional<QuantumChannel> channel_certificate;
  std::optional<Povm> povm;
  std::vector<CMatrix> preparations;
  DfmBackend backend = DfmBackend::seesaw;
  int iterations = 0;
  int restarts = 0;
  double gap = 0.0;
  bool converged = true;
};

struct DfmOptions {
  DfmBackend backend = DfmBackend::seesaw;
  double tol = 1e-9;
  int restarts = 4;
  int max_sweeps = 200;
  std::uint64_t seed = 0;
  sdp::SdpOptions sdp;
};

/// D_F(A;B) = -log2 sup over entanglement-breaking E_A of F(rho, E_A(rho)).
DfmResult dfm(const MultipartiteState& rho, const Labels& a, const Labels& b,
              const DfmOptions& opts = {});

/// -log2 Tr psi_A^2 with the eigenbasis measure-and-prepare certificate.
DfmResult dfm_pure(const MultipartiteState& psi, const Labels& a, const Labels& b);

/// F(rho, E_A(rho)) for a channel on the A group.
double eb_fidelity(const MultipartiteState& rho, const Labels& a, const Labels& b,
                   const QuantumChannel& eb);

/// I(X;B) for sigma_XB = sum_x |x><x| (x) Tr_A{(Lambda^x (x) I) rho}.
double classical_information(const MultipartiteState& rho, const Labels& a, const Labels& b,
                             const Povm& povm);

struct DiscordOptions {
  int theta_steps = 30;
  int phi_steps = 60;
  /// Local-search restarts for |A| >= 3.
  int restarts = 8;
  int search_steps = 400;
  std::uint64_t seed = 0;
};

struct DiscordResult {
  double value = 0.0;
  Povm povm = computational_povm(1);
  double mutual_information = 0.0;
  double classical_information = 0.0;
  /// The measurement is feasible, so value is an upper bound on D.
  BoundKind bound = BoundKind::upper;
};

/// I(A;B) - sup_POVM I(X;B). Qubit A: Bloch grid plus pattern refinement of
/// projective measurements. Larger A: local search over rank-one POVMs with
/// |A|^2 outcomes.
DiscordResult discord(const MultipartiteState& rho, const Labels& a, const Labels& b,
                      const DiscordOptions& opts = {});

/// I(E;B|X) of U^M(rho) with U^M the measurement isometry.
double discord_as_cqmi(const MultipartiteState& rho, const Labels& a, const Labels& b,
                       const Povm& povm);

struct FixedPointWitness {
  QuantumChannel channel;
  double trace_distance = 0.0;
  /// Certified upper bound on D_F in bits.
  double d_value = 0.0;
  /// 2 sqrt(D_F ln 2).
  double bound = 0.0;
  bool holds = true;
  bool within_budget = true;
};

/// ||rho - E(rho)||_1 for the see-saw certificate E and the bound
/// 2 sqrt(D_F) in natural units.
FixedPointWitness approx_fixed_point_witness(const MultipartiteState& rho, const Labels& a,
                                             const Labels& b, double eps_budget,
                                             const DfmOptions& opts = {});

struct DiscordBound {
  double bound = 0.0;
  double epsilon = 0.0;
  bool clamped = false;
};

/// 4 h2(eps) + 8 eps log2|A| with eps = ||rho - E(rho)||_1, eps clamped to 1.
DiscordBound discord_upper_from_fixed_point(const MultipartiteState& rho, const Labels& a,
                                            const Labels& b, const QuantumChannel& eb);

}  // namespace recoverlib

#endif  // RECOVERLIB_MEASREC_HPP
