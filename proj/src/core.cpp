#include "recoverlib/core.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace recoverlib {

int product(const Dims& dims) {
  int p = 1;
  for (int d : dims) p *= d;
  return p;
}

double log2(double x) { return std::log2(x); }

CMatrix dagger(const CMatrix& m) { return m.adjoint(); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix hermitian_part(const CMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

double max_asymmetry(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

HermitianEig hermitian_eig(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h));
  return {es.eigenvalues(), es.eigenvectors()};
}

CMatrix psd_sqrt(const CMatrix& p) {
  return spectral_apply(p, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

CMatrix psd_power(const CMatrix& p, double power, double rel_cutoff) {
  HermitianEig e = hermitian_eig(p);
  double lmax = e.values.size() ? e.values.maxCoeff() : 0.0;
  double cut = rel_cutoff * std::max(lmax, 0.0);
  CMatrix out = CMatrix::Zero(p.rows(), p.cols());
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    double v = e.values(k);
    if (v <= cut || v <= 0.0) continue;
    out.noalias() += std::pow(v, power) * e.vectors.col(k) * e.vectors.col(k).adjoint();
  }
  return out;
}

CMatrix support_basis(const CMatrix& p, double rel_cutoff) {
  HermitianEig e = hermitian_eig(p);
  double lmax = e.values.size() ? e.values.maxCoeff() : 0.0;
  double cut = rel_cutoff * std::max(lmax, 0.0);
  std::vector<Eigen::Index> keep;
  // Descending eigenvalue order.
  for (Eigen::Index k = e.values.size() - 1; k >= 0; --k)
    if (e.values(k) > cut && e.values(k) > 0.0) keep.push_back(k);
  CMatrix out(p.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) out.col(c) = e.vectors.col(keep[c]);
  return out;
}

CMatrix support_projector(const CMatrix& p, double rel_cutoff) {
  CMatrix v = support_basis(p, rel_cutoff);
  return v * v.adjoint();
}

double min_eigenvalue(const CMatrix& h) {
  if (h.size() == 0) return 0.0;
  return hermitian_eig(h).values.minCoeff();
}

double trace_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().sum();
}

CMatrix polar_isometry(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace recoverlib
