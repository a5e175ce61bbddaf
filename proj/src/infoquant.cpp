#include "recoverlib/infoquant.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace recoverlib {

namespace {

constexpr double kPsdTol = 1e-9;
constexpr double kSupportCut = 1e-12;

void require_psd(const CMatrix& m, const char* what) {
  if (min_eigenvalue(m) < -kPsdTol)
    throw InputError(std::string(what) + ": operand is not positive semidefinite");
}

void require_alpha(double alpha) {
  if (!(alpha >= 0.0) || alpha == 1.0 || std::isinf(alpha))
    throw InputError("Renyi parameter must lie in [0,1) or (1,inf)");
}

// Weight of rho outside the support of sigma.
double weight_outside_support(const CMatrix& rho, const CMatrix& sigma) {
  CMatrix perp = CMatrix::Identity(sigma.rows(), sigma.cols()) - support_projector(sigma, kSupportCut);
  return (perp * rho).trace().real();
}

Labels concat(const Labels& a, const Labels& b) {
  Labels out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void require_disjoint(const Labels& a, const Labels& b, const Labels& c) {
  Labels all = concat(concat(a, b), c);
  std::vector<std::string> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InputError("label groups overlap");
}

}  // namespace

double root_fidelity(const CMatrix& p, const CMatrix& q) {
  require_psd(p, "fidelity");
  require_psd(q, "fidelity");
  CMatrix prod = psd_sqrt(p) * psd_sqrt(q);
  return trace_norm(prod);
}

double fidelity(const CMatrix& p, const CMatrix& q) {
  double s = root_fidelity(p, q);
  return s * s;
}

double fidelity(const MultipartiteState& rho, const MultipartiteState& sigma) {
  if (rho.dims() != sigma.dims()) throw InputError("fidelity: dimension mismatch");
  return fidelity(rho.matrix(), sigma.matrix());
}

double trace_distance(const CMatrix& rho, const CMatrix& sigma) {
  HermitianEig e = hermitian_eig(rho - sigma);
  return e.values.cwiseAbs().sum();
}

double purified_distance(const CMatrix& rho, const CMatrix& sigma) {
  double f = std::min(1.0, fidelity(rho, sigma));
  return std::sqrt(std::max(0.0, 1.0 - f));
}

double von_neumann_entropy(const CMatrix& rho) {
  HermitianEig e = hermitian_eig(rho);
  double h = 0.0;
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    double p = e.values(k);
    if (p > 1e-300) h -= p * std::log2(p);
  }
  return h;
}

double von_neumann_entropy(const MultipartiteState& s) { return von_neumann_entropy(s.matrix()); }

double entropy_of(const MultipartiteState& s, const Labels& group) {
  if (group.empty()) return 0.0;
  return von_neumann_entropy(partial_trace(s, group));
}

double cqmi(const MultipartiteState& s, const Labels& a, const Labels& b, const Labels& c) {
  require_disjoint(a, b, c);
  if (a.empty() || b.empty()) throw InputError("cqmi: A and B must be nonempty");
  return entropy_of(s, concat(a, c)) + entropy_of(s, concat(b, c)) - entropy_of(s, c) -
         entropy_of(s, concat(concat(a, b), c));
}

double mutual_information(const MultipartiteState& s, const Labels& a, const Labels& b) {
  return cqmi(s, a, b, {});
}

Divergence renyi_relative_entropy(const CMatrix& rho, const CMatrix& sigma, double alpha) {
  require_alpha(alpha);
  Divergence d;
  if (alpha > 1.0 && weight_outside_support(rho, sigma) > kSupportCut) {
    d.infinite = true;
    return d;
  }
  CMatrix ra = alpha == 0.0 ? support_projector(rho, kSupportCut) : psd_power(rho, alpha, 0.0);
  CMatrix sb = psd_power(sigma, 1.0 - alpha, kSupportCut);
  double q = (ra * sb).trace().real();
  if (q <= 0.0) {
    d.infinite = true;
    return d;
  }
  d.value = std::log2(q) / (alpha - 1.0);
  return d;
}

Divergence sandwiched_renyi(const CMatrix& rho, const CMatrix& sigma, double alpha) {
  require_alpha(alpha);
  if (alpha == 0.0) throw InputError("sandwiched Renyi divergence needs alpha > 0");
  Divergence d;
  if (alpha > 1.0 && weight_outside_support(rho, sigma) > kSupportCut) {
    d.infinite = true;
    return d;
  }
  CMatrix x = psd_power(sigma, (1.0 - alpha) / (2.0 * alpha), kSupportCut) * psd_sqrt(rho);
  // ||x||_{2a}^{2a} from singular values; 2a < 1 is a quasi-norm, still fine here.
  RVector sv = Eigen::JacobiSVD<CMatrix>(x).singularValues();
  double q = 0.0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > 0.0) q += std::pow(sv(k), 2.0 * alpha);
  if (q <= 0.0) {
    d.infinite = true;
    return d;
  }
  d.value = std::log2(q) / (alpha - 1.0);
  return d;
}

Divergence relative_entropy(const CMatrix& rho, const CMatrix& sigma) {
  Divergence d;
  if (weight_outside_support(rho, sigma) > kSupportCut) {
    d.infinite = true;
    return d;
  }
  auto safe_log = [](double x) { return x > 0.0 ? std::log2(x) : 0.0; };
  CMatrix log_rho = spectral_apply(rho, safe_log);
  HermitianEig es = hermitian_eig(sigma);
  double cut = kSupportCut * es.values.maxCoeff();
  CMatrix log_sigma = CMatrix::Zero(sigma.rows(), sigma.cols());
  for (Eigen::Index k = 0; k < es.values.size(); ++k)
    if (es.values(k) > cut)
      log_sigma += std::log2(es.values(k)) * es.vectors.col(k) * es.vectors.col(k).adjoint();
  d.value = (rho * (log_rho - log_sigma)).trace().real();
  return d;
}

Divergence conditional_renyi_entropy(const MultipartiteState& s, const Labels& a,
                                     const Labels& b, double alpha) {
  require_disjoint(a, b, {});
  MultipartiteState ab = permute_systems(partial_trace(s, concat(a, b)), concat(a, b));
  const int da = ab.dim_of(a);
  CMatrix rho_b = trace_leading(ab.matrix(), da);
  CMatrix sigma = kron(CMatrix::Identity(da, da), rho_b);
  Divergence d = renyi_relative_entropy(ab.matrix(), sigma, alpha);
  d.value = -d.value;
  return d;
}

RenyiCqmi renyi_cqmi(const MultipartiteState& s, const Labels& a, const Labels& b,
                     const Labels& c, double alpha) {
  require_disjoint(a, b, c);
  if (!(alpha > 0.0) || alpha == 1.0 || std::isinf(alpha))
    throw InputError("renyi_cqmi: alpha must lie in (0,1) or (1,inf)");
  Labels abc = concat(concat(a, b), c);
  MultipartiteState full = permute_systems(partial_trace(s, abc), abc);
  const Labels& labels = full.labels();
  const Dims& dims = full.dims();

  RenyiCqmi out;
  auto marginal_power = [&](const Labels& group, double power) -> CMatrix {
    if (group.empty()) return CMatrix::Identity(full.dim(), full.dim());
    CMatrix m = partial_trace(full, group).matrix();
    if (power < 0.0) {
      HermitianEig e = hermitian_eig(m);
      if (e.values.minCoeff() <= kSupportCut * e.values.maxCoeff()) out.cutoff_engaged = true;
    }
    return embed_operator(psd_power(m, power, kSupportCut), group, labels, dims);
  };

  const double e = (1.0 - alpha) / (2.0 * alpha);
  CMatrix x = psd_sqrt(full.matrix()) * marginal_power(concat(a, c), e) *
              marginal_power(c, -e) * marginal_power(concat(b, c), e);
  Eigen::JacobiSVD<CMatrix> svd(x);
  double acc = 0.0;
  const RVector& sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 0.0) acc += std::pow(sv(i), 2.0 * alpha);
  out.value = std::log2(acc) / (alpha - 1.0);
  return out;
}

double binary_entropy(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw InputError("binary_entropy: argument outside [0,1]");
  if (eps == 0.0 || eps == 1.0) return 0.0;
  return -eps * std::log2(eps) - (1.0 - eps) * std::log2(1.0 - eps);
}

}  // namespace recoverlib
