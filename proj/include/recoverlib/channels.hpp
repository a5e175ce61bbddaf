#ifndef RECOVERLIB_CHANNELS_HPP
#define RECOVERLIB_CHANNELS_HPP

#include "recoverlib/qcore.hpp"

namespace recoverlib {

/// CPTP map stored by its unnormalized Choi matrix
///   J = sum_{ij} |i><j|_in (x) N(|i><j|)
/// on (input (x) output), input most significant.
class QuantumChannel {
 public:
  QuantumChannel(Dims in_dims, Dims out_dims, CMatrix choi);

  const Dims& in_dims() const { return in_dims_; }
  const Dims& out_dims() const { return out_dims_; }
  int in_dim() const { return product(in_dims_); }
  int out_dim() const { return product(out_dims_); }
  const CMatrix& choi() const { return choi_; }

  /// Action on a bare operator on the input space.
  CMatrix operator()(const CMatrix& x) const;

 private:
  Dims in_dims_;
  Dims out_dims_;
  CMatrix choi_;
};

/// Positive operator-valued measure on one system.
class Povm {
 public:
  explicit Povm(std::vector<CMatrix> effects);
  const std::vector<CMatrix>& effects() const { return effects_; }
  int dim() const { return static_cast<int>(effects_.front().rows()); }
  int outcomes() const { return static_cast<int>(effects_.size()); }

 private:
  std::vector<CMatrix> effects_;
};

/// Linear map with V^dagger V = I, shaped (out x in).
class Isometry {
 public:
  Isometry(Dims in_dims, Dims out_dims, CMatrix matrix);
  const Dims& in_dims() const { return in_dims_; }
  const Dims& out_dims() const { return out_dims_; }
  const CMatrix& matrix() const { return matrix_; }

 private:
  Dims in_dims_;
  Dims out_dims_;
  CMatrix matrix_;
};

// -- raw Choi arithmetic (no validation; used inside optimizers) -------------

/// (id_R (x) N)(M) for M on (R (x) in), where N has Choi `choi` (in (x) out).
/// Result on (R (x) out).
CMatrix apply_choi(const CMatrix& choi, int in_dim, int out_dim, const CMatrix& m);

/// Choi matrix of the map X -> sum_k K_k X K_k^dagger (not necessarily TP).
CMatrix choi_from_kraus(const std::vector<CMatrix>& kraus);

/// Tr_out J, an operator on the input.
CMatrix choi_input_marginal(const CMatrix& choi, int in_dim, int out_dim);

/// Partial transpose of the output factor.
CMatrix partial_transpose_output(const CMatrix& choi, int in_dim, int out_dim);

// -- operations --------------------------------------------------------------

/// Apply `ch` to the subsystems `target` of `s`. The output subsystems take
/// the position of the first target label and are named `out_labels`
/// (defaults to `target` when the subsystem counts agree).
MultipartiteState apply(const QuantumChannel& ch, const MultipartiteState& s,
                        const Labels& target, const Labels& out_labels = {});

QuantumChannel kraus_to_choi(const std::vector<CMatrix>& kraus, const Dims& in_dims,
                             const Dims& out_dims);
std::vector<CMatrix> choi_to_kraus(const QuantumChannel& ch);

QuantumChannel identity_channel(const Dims& dims);
QuantumChannel unitary_channel(const CMatrix& u, const Dims& dims);
QuantumChannel isometry_channel(const Isometry& v);
/// X -> Tr(X) * tau.
QuantumChannel replacement_channel(const Dims& in_dims, const CMatrix& tau,
                                   const Dims& out_dims);
QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first);
/// N1 (x) N2.
QuantumChannel tensor_channels(const QuantumChannel& a, const QuantumChannel& b);

/// Random channel with `kraus_count` Kraus operators from a random isometry.
QuantumChannel random_channel(const Dims& in_dims, const Dims& out_dims, int kraus_count,
                              Rng& rng);

/// Petz recovery map C -> A C for rho on (A, C):
///   X -> rho_AC^{1/2} rho_C^{-1/2} X rho_C^{-1/2} rho_AC^{1/2},
/// with inverse square roots taken on the support of rho_C (cutoff
/// 1e-10 * lambda_max). Input weight on the kernel of rho_C is sent to rho_AC
/// so that the map is trace preserving. Output ordering is (A..., C...).
QuantumChannel petz_recovery(const MultipartiteState& rho_AC, const Labels& recover,
                             const Labels& from);

/// Number of kernel dimensions of rho_C handled by the TP-completion branch.
int petz_kernel_rank(const MultipartiteState& rho_AC, const Labels& from);

/// w -> V^dagger w V + Tr{(I - V V^dagger) w} tau, a channel from the output
/// space of V back to its input space.
QuantumChannel isometry_inverse_channel(const Isometry& v, const MultipartiteState& tau);

/// A -> X with output diag(Tr{Lambda^x w}).
QuantumChannel measurement_channel(const Povm& p);

/// A -> X (x) E with U|psi> = sum_{x,y} |x>_X |x,y>_E <phi_{x,y}|psi>, built
/// from the rank-one refinement of the effects (eigenvalues descending,
/// largest-magnitude component of each eigenvector real positive).
Isometry measurement_isometry(const Povm& p);

/// Measure-and-prepare channel, Choi = sum_x (Lambda^x)^T (x) sigma^x.
QuantumChannel eb_channel(const Povm& p, const std::vector<CMatrix>& preparations);

/// Complete dephasing in the orthonormal basis given by the columns of
/// `basis` (identity matrix for the computational basis).
QuantumChannel dephasing_channel(int dim, const CMatrix& basis);

/// gamma = U (Phi_AB (x) sigma_{A'B'}) U^dagger with
/// U = sum_i |i><i|_A (x) I_B (x) V^i_{A'B'}. Labels are A, B, A', B'.
MultipartiteState private_state(int key_dim, const Dims& shield_dims,
                                const std::vector<CMatrix>& twisting,
                                const MultipartiteState& sigma_shield);

/// Minimal Stinespring dilation U: in -> out (x) E, E of dimension rank(J).
Isometry stinespring(const QuantumChannel& ch);

/// Measurement in the computational basis of dimension d.
Povm computational_povm(int d);

/// Rank-one POVM with `outcomes` effects |v_x><v_x| drawn from a random
/// isometry.
Povm random_povm(int dim, int outcomes, Rng& rng);

/// True when the Choi matrix is PSD and TP within `tol`.
bool is_cptp(const CMatrix& choi, int in_dim, int out_dim, double tol = 1e-8);

}  // namespace recoverlib

#endif  // RECOVERLIB_CHANNELS_HPP
