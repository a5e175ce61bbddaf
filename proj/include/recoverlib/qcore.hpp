#ifndef RECOVERLIB_QCORE_HPP
#define RECOVERLIB_QCORE_HPP

#include "recoverlib/core.hpp"

#include <cstdint>
#include <random>

namespace recoverlib {

// Index convention used everywhere: the first label is the most significant
// digit of the row-major flat index, i.e. |i_1 i_2 ... i_k> sits at
// i_1*(d_2...d_k) + ... + i_k.

/// Density matrix on a labelled tensor product of subsystems.
///
/// Construction enforces the state invariants: Hermitian within 1e-9 (the
/// Hermitian part is kept), smallest eigenvalue >= -1e-9, trace within 1e-6 of
/// one (renormalized exactly). Anything outside those tolerances throws
/// InputError naming the violated check.
class MultipartiteState {
 public:
  MultipartiteState(Dims dims, Labels labels, CMatrix matrix);

  const Dims& dims() const { return dims_; }
  const Labels& labels() const { return labels_; }
  const CMatrix& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  /// Trace of the matrix passed to the constructor minus one.
  double trace_correction() const { return trace_correction_; }

  int index_of(const std::string& label) const;
  int dim_of(const std::string& label) const;
  int dim_of(const Labels& group) const;
  bool has(const std::string& label) const;

  double purity() const;

 private:
  Dims dims_;
  Labels labels_;
  CMatrix matrix_;
  double trace_correction_ = 0.0;
};

/// Unit vector on a labelled tensor product.
class PureStateVector {
 public:
  PureStateVector(Dims dims, Labels labels, CVector amplitudes);

  const Dims& dims() const { return dims_; }
  const Labels& labels() const { return labels_; }
  const CVector& amplitudes() const { return amplitudes_; }

  MultipartiteState density() const;

 private:
  Dims dims_;
  Labels labels_;
  CVector amplitudes_;
};

/// Deterministic random source keyed by (seed, stream). Two instances with the
/// same key produce the same sequence regardless of threading.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream = 0);

  double normal();
  double uniform();
  cplx complex_normal();
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Independent generator for a sub-task (restart, sample).
  Rng split(std::uint64_t substream) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Kronecker product of states with disjoint label sets.
MultipartiteState tensor(const MultipartiteState& a, const MultipartiteState& b);

MultipartiteState partial_trace(const MultipartiteState& s, const Labels& keep);

MultipartiteState permute_systems(const MultipartiteState& s, const Labels& new_order);

/// Purification with a reference system of dimension rank(s).
PureStateVector purify(const MultipartiteState& s, const std::string& ref_label);

struct SchmidtDecomposition {
  /// Squared Schmidt coefficients, descending, summing to one.
  RVector coefficients;
  CMatrix left;   // columns: basis of the cut side
  CMatrix right;  // columns: basis of the complement
};

SchmidtDecomposition schmidt(const PureStateVector& v, const Labels& cut);

/// (sum_i s_i^alpha)^(1/alpha) over singular values; alpha = +inf gives the
/// operator norm.
double schatten_norm(const CMatrix& x, double alpha);

PureStateVector random_pure(const Dims& dims, const Labels& labels, Rng& rng);

/// Hilbert-Schmidt induced measure: trace over a rank-dimensional ancilla of a
/// Haar random pure state.
MultipartiteState random_density(const Dims& dims, const Labels& labels, int rank,
                                 Rng& rng);

/// Haar-ish random isometry (rows x cols, rows >= cols) from QR of a Ginibre
/// matrix with phase correction.
CMatrix random_isometry(int rows, int cols, Rng& rng);

CMatrix random_unitary(int d, Rng& rng);

// -- raw index arithmetic ---------------------------------------------------

/// For each flat index of the permuted space, the flat index in the original
/// space. order[k] is the original position of the k-th new subsystem.
std::vector<int> permutation_index_map(const Dims& dims, const std::vector<int>& order);

CMatrix permute_matrix(const CMatrix& m, const Dims& dims, const std::vector<int>& order);

/// Trace out the trailing subsystem of dimension `traced` from a matrix on
/// (kept x traced).
CMatrix trace_trailing(const CMatrix& m, int traced);

/// Trace out the leading subsystem of dimension `traced`.
CMatrix trace_leading(const CMatrix& m, int traced);

/// Embed an operator on the labelled subset `op_labels` of `labels` into the
/// full space (identity elsewhere).
CMatrix embed_operator(const CMatrix& op, const Labels& op_labels, const Labels& labels,
                       const Dims& dims);

// -- named states ------------------------------------------------------------

MultipartiteState basis_state(const Dims& dims, const Labels& labels,
                              const std::vector<int>& digits);
MultipartiteState maximally_mixed(const Dims& dims, const Labels& labels);
/// |Phi> = d^{-1/2} sum_i |ii>.
PureStateVector max_entangled_vector(int d, const std::string& a = "A",
                                     const std::string& b = "B");
MultipartiteState max_entangled(int d, const std::string& a = "A",
                                const std::string& b = "B");
/// (1/d) sum_x |xx><xx|.
MultipartiteState classical_copy(int d, const std::string& x = "X",
                                 const std::string& b = "B");
PureStateVector ghz_vector(int parties, int d, const Labels& labels);

}  // namespace recoverlib

#endif  // RECOVERLIB_QCORE_HPP
