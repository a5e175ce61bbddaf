#ifndef RECOVERLIB_SDP_HPP
#define RECOVERLIB_SDP_HPP

#include "recoverlib/core.hpp"

#include <string>

namespace recoverlib::sdp {

/// Entry of a symmetric matrix; (row, col) with row <= col stands for both
/// (row, col) and (col, row).
struct SymEntry {
  int block;
  int row;
  int col;
  double value;
};

/// Block-diagonal real SDP in primal standard form
///
///   minimize    C . X
///   subject to  A_i . X = b_i,   X >= 0 (each block PSD).
///
/// Dual:  maximize b^T y  subject to  sum_i y_i A_i + S = C,  S >= 0.
struct RealSdp {
  std::vector<int> block_sizes;
  std::vector<RMatrix> objective;
  /// Entries of each A_i, sorted by block.
  std::vector<std::vector<SymEntry>> constraints;
  RVector rhs;

  int constraint_count() const { return static_cast<int>(constraints.size()); }
};

struct SdpOptions {
  double gap_tol = 1e-9;
  double feas_tol = 1e-9;
  int max_iterations = 200;
  bool parallel = true;
};

enum class SdpStatus { optimal, max_iterations, stalled, numerical_error };

std::string to_string(SdpStatus s);

struct SdpSolution {
  std::vector<RMatrix> x;
  std::vector<RMatrix> s;
  RVector y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  SdpStatus status = SdpStatus::numerical_error;

  double gap() const { return primal_objective - dual_objective; }
};

/// Infeasible primal-dual path-following method (HKM direction, Mehrotra
/// predictor-corrector).
SdpSolution solve(const RealSdp& problem, const SdpOptions& options = {});

// -- complex Hermitian front end ---------------------------------------------

/// Entry of a Hermitian matrix; (row, col) with row <= col stands for
/// value at (row, col) and conj(value) at (col, row). Diagonal values must be
/// real.
struct HermEntry {
  int row;
  int col;
  cplx value;
};

struct HermTerm {
  int block;
  std::vector<HermEntry> entries;
};

/// sum_terms Tr(A_term X_block) = rhs.
struct ComplexConstraint {
  std::vector<HermTerm> terms;
  double rhs = 0.0;
};

/// minimize sum_b Tr(C_b X_b) over Hermitian PSD blocks X_b subject to
/// linear constraints. Solved through the real embedding
/// H -> [[Re H, -Im H], [Im H, Re H]].
struct ComplexSdp {
  std::vector<int> block_sizes;
  std::vector<std::vector<HermEntry>> objective;
  std::vector<ComplexConstraint> constraints;

  int add_block(int size);
};

struct ComplexSdpSolution {
  std::vector<CMatrix> x;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  SdpStatus status = SdpStatus::numerical_error;

  double gap() const { return primal_objective - dual_objective; }
};

RealSdp realify(const ComplexSdp& problem);

ComplexSdpSolution solve(const ComplexSdp& problem, const SdpOptions& options = {});

/// Hermitian matrix from the upper-triangle entry list.
CMatrix to_dense(const std::vector<HermEntry>& entries, int size);

/// Nonzero upper-triangle entries of a dense Hermitian matrix.
std::vector<HermEntry> from_dense(const CMatrix& m, double drop = 1e-14);

}  // namespace recoverlib::sdp

#endif  // RECOVERLIB_SDP_HPP
