#ifndef RECOVERLIB_FIDELITY_PROGRAM_HPP
#define RECOVERLIB_FIDELITY_PROGRAM_HPP

#include "recoverlib/sdp.hpp"

#include <functional>

namespace recoverlib {

/// Linear map on the operators of one variable block.
using LinearMap = std::function<CMatrix(const CMatrix&)>;

/// constant + sum_k map_k(X_{var_k}). All terms must land in the same space.
/// Maps must be positive (they are probed on matrix units and on the interior
/// point to find the support of the operator).
struct AffineOperator {
  CMatrix constant;
  std::vector<std::pair<int, LinearMap>> terms;

  static AffineOperator fixed(const CMatrix& m) { return {m, {}}; }
};

struct FidelityOutcome {
  /// -(primal objective): the attained max of Re Tr Z, i.e. sqrt(F).
  double root_fidelity = 0.0;
  /// Dual bound on sqrt(F).
  double root_fidelity_bound = 0.0;
  std::vector<CMatrix> variables;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  sdp::SdpStatus status = sdp::SdpStatus::numerical_error;

  double fidelity() const { return root_fidelity * root_fidelity; }
  double gap() const { return std::abs(root_fidelity_bound - root_fidelity); }
  bool converged() const { return status == sdp::SdpStatus::optimal; }
};

/// Maximizes sqrt F(P(X), Q(X)) over PSD variable blocks X_v obeying linear
/// constraints, where P and Q are affine in the variables. Uses
///   sqrt F(P,Q) = max Re Tr Z  s.t.  [[P, Z], [Z^dagger, Q]] >= 0,
/// with each side compressed to its support so that the program stays
/// strictly feasible.
class FidelityProgram {
 public:
  /// `interior` must satisfy every constraint later placed on the block and be
  /// positive definite.
  int add_variable(int size, CMatrix interior);

  int variable_count() const { return static_cast<int>(sizes_.size()); }
  int size_of(int var) const { return sizes_.at(var); }

  /// Hermitian matrix identity sum_v adj_v^dagger(X_v) = rhs expressed through
  /// the adjoints: for every Hermitian H, sum_v Tr(adj_v(H) X_v) = Tr(H rhs).
  void add_matrix_equation(std::vector<std::pair<int, LinearMap>> adjoints, const CMatrix& rhs);

  /// Tr_out X = I for X on (in (x) out).
  void require_partial_trace_identity(int var, int in_dim, int out_dim);
  void require_unit_trace(int var);
  /// sum_v X_v = I.
  void require_sum_identity(const std::vector<int>& vars);
  /// X_image = X_var^{T_out}.
  void require_partial_transpose(int image, int var, int in_dim, int out_dim);

  FidelityOutcome maximize(const AffineOperator& p, const AffineOperator& q,
                           const sdp::SdpOptions& options = {}) const;

 private:
  std::vector<int> sizes_;
  std::vector<CMatrix> interior_;
  std::vector<sdp::ComplexConstraint> constraints_;
};

/// Relative eigenvalue cutoff used for the support compressions.
inline constexpr double kSupportCutoff = 1e-11;

}  // namespace recoverlib

#endif  // RECOVERLIB_FIDELITY_PROGRAM_HPP
