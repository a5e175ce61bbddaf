#ifndef RECOVERLIB_CORE_HPP
#define RECOVERLIB_CORE_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace recoverlib {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

using Dims = std::vector<int>;
using Labels = std::vector<std::string>;

/// Malformed input: wrong dimensions, unknown labels, violated state or
/// channel invariants.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An optimizer stopped before reaching its stated tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double gap, double primal_infeas,
              double dual_infeas, int iterations)
      : std::runtime_error(what),
        gap(gap),
        primal_infeas(primal_infeas),
        dual_infeas(dual_infeas),
        iterations(iterations) {}
  double gap;
  double primal_infeas;
  double dual_infeas;
  int iterations;
};

int product(const Dims& dims);

/// Log base two, with 0*log(0) handled by callers.
double log2(double x);

CMatrix dagger(const CMatrix& m);

/// Kronecker product of two dense complex matrices.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// (M + M^dagger)/2.
CMatrix hermitian_part(const CMatrix& m);

double max_asymmetry(const CMatrix& m);

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
struct HermitianEig {
  RVector values;
  CMatrix vectors;
};
HermitianEig hermitian_eig(const CMatrix& h);

/// V f(D) V^dagger for Hermitian H = V D V^dagger.
template <typename F>
CMatrix spectral_apply(const CMatrix& h, F&& f) {
  HermitianEig e = hermitian_eig(h);
  CMatrix out = CMatrix::Zero(h.rows(), h.cols());
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    double fk = f(e.values(k));
    if (fk == 0.0) continue;
    out.noalias() += fk * e.vectors.col(k) * e.vectors.col(k).adjoint();
  }
  return out;
}

/// Square root of a positive semidefinite matrix; eigenvalues below zero are
/// clamped to zero.
CMatrix psd_sqrt(const CMatrix& p);

/// Power of a PSD matrix restricted to its support. Eigenvalues at or below
/// rel_cutoff * lambda_max are treated as zero (and map to zero for any power).
CMatrix psd_power(const CMatrix& p, double power, double rel_cutoff = 1e-12);

/// Orthogonal projector onto the eigenvectors with eigenvalue above
/// rel_cutoff * lambda_max.
CMatrix support_projector(const CMatrix& p, double rel_cutoff = 1e-12);

/// Columns spanning the support of a PSD matrix (an isometry).
CMatrix support_basis(const CMatrix& p, double rel_cutoff = 1e-12);

double min_eigenvalue(const CMatrix& h);

/// Sum of singular values.
double trace_norm(const CMatrix& m);

/// Polar isometry U with M = U |M| (thin: U has the shape of M).
CMatrix polar_isometry(const CMatrix& m);

}  // namespace recoverlib

#endif  // RECOVERLIB_CORE_HPP
