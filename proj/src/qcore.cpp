#include "recoverlib/qcore.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace recoverlib {

namespace {

constexpr double kHermitianTol = 1e-9;
constexpr double kPsdTol = 1e-9;
constexpr double kTraceTol = 1e-6;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_dims_labels(const Dims& dims, const Labels& labels) {
  if (dims.size() != labels.size())
    throw InputError("dims and labels differ in length");
  for (int d : dims)
    if (d < 1) throw InputError("subsystem dimension must be positive");
  std::set<std::string> seen(labels.begin(), labels.end());
  if (seen.size() != labels.size()) throw InputError("duplicate subsystem label");
}

std::vector<int> positions_of(const Labels& labels, const Labels& wanted) {
  std::vector<int> pos;
  for (const auto& w : wanted) {
    auto it = std::find(labels.begin(), labels.end(), w);
    if (it == labels.end()) throw InputError("unknown label '" + w + "'");
    pos.push_back(static_cast<int>(it - labels.begin()));
  }
  return pos;
}

}  // namespace

// ---------------------------------------------------------------------------

MultipartiteState::MultipartiteState(Dims dims, Labels labels, CMatrix matrix)
    : dims_(std::move(dims)), labels_(std::move(labels)) {
  check_dims_labels(dims_, labels_);
  int n = product(dims_);
  if (matrix.rows() != n || matrix.cols() != n)
    throw InputError("matrix side " + std::to_string(matrix.rows()) +
                     " does not match product of dims " + std::to_string(n));
  double asym = max_asymmetry(matrix);
  if (asym > kHermitianTol) {
    Eigen::Index r = 0, c = 0;
    (matrix - matrix.adjoint()).cwiseAbs().maxCoeff(&r, &c);
    std::ostringstream os;
    os << "matrix not Hermitian: |M - M^dagger| = " << asym << " at entry (" << r << ", "
       << c << ") exceeds tolerance 1e-9";
    throw InputError(os.str());
  }
  CMatrix h = hermitian_part(matrix);
  double tr = h.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    std::ostringstream os;
    os << "trace " << tr << " differs from 1 by more than tolerance 1e-6";
    throw InputError(os.str());
  }
  double lmin = min_eigenvalue(h);
  if (lmin < -kPsdTol) {
    std::ostringstream os;
    os << "matrix not positive semidefinite: smallest eigenvalue " << lmin
       << " below tolerance -1e-9";
    throw InputError(os.str());
  }
  trace_correction_ = tr - 1.0;
  matrix_ = h / tr;
}

int MultipartiteState::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw InputError("unknown label '" + label + "'");
  return static_cast<int>(it - labels_.begin());
}

int MultipartiteState::dim_of(const std::string& label) const {
  return dims_[index_of(label)];
}

int MultipartiteState::dim_of(const Labels& group) const {
  int d = 1;
  for (const auto& l : group) d *= dim_of(l);
  return d;
}

bool MultipartiteState::has(const std::string& label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

double MultipartiteState::purity() const { return (matrix_ * matrix_).trace().real(); }

PureStateVector::PureStateVector(Dims dims, Labels labels, CVector amplitudes)
    : dims_(std::move(dims)), labels_(std::move(labels)), amplitudes_(std::move(amplitudes)) {
  check_dims_labels(dims_, labels_);
  if (amplitudes_.size() != product(dims_))
    throw InputError("amplitude count does not match product of dims");
  double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > 1e-10) {
    if (norm == 0.0 || std::abs(norm - 1.0) > 1e-6)
      throw InputError("state vector not normalized");
    amplitudes_ /= norm;
  }
}

MultipartiteState PureStateVector::density() const {
  return MultipartiteState(dims_, labels_, amplitudes_ * amplitudes_.adjoint());
}

// ---------------------------------------------------------------------------

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream),
      engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

double Rng::normal() { return normal_(engine_); }
double Rng::uniform() { return uniform_(engine_); }
cplx Rng::complex_normal() {
  double re = normal();
  double im = normal();
  return {re, im};
}

Rng Rng::split(std::uint64_t substream) const {
  return Rng(seed_, splitmix64(stream_ * 0x9e3779b97f4a7c15ULL + substream + 1));
}

// ---------------------------------------------------------------------------

std::vector<int> permutation_index_map(const Dims& dims, const std::vector<int>& order) {
  const int k = static_cast<int>(dims.size());
  // Strides of the original layout.
  std::vector<int> stride(k, 1);
  for (int i = k - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];
  Dims new_dims(k);
  for (int i = 0; i < k; ++i) new_dims[i] = dims[order[i]];
  const int n = product(dims);
  std::vector<int> map(n);
  std::vector<int> digit(k, 0);
  for (int flat = 0; flat < n; ++flat) {
    int old = 0;
    for (int i = 0; i < k; ++i) old += digit[i] * stride[order[i]];
    map[flat] = old;
    for (int i = k - 1; i >= 0; --i) {
      if (++digit[i] < new_dims[i]) break;
      digit[i] = 0;
    }
  }
  return map;
}

CMatrix permute_matrix(const CMatrix& m, const Dims& dims, const std::vector<int>& order) {
  auto map = permutation_index_map(dims, order);
  const int n = static_cast<int>(map.size());
  CMatrix out(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out(i, j) = m(map[i], map[j]);
  return out;
}

CMatrix trace_trailing(const CMatrix& m, int traced) {
  const Eigen::Index kept = m.rows() / traced;
  CMatrix out = CMatrix::Zero(kept, kept);
  for (Eigen::Index a = 0; a < kept; ++a)
    for (Eigen::Index b = 0; b < kept; ++b) {
      cplx s = 0.0;
      for (int t = 0; t < traced; ++t) s += m(a * traced + t, b * traced + t);
      out(a, b) = s;
    }
  return out;
}

CMatrix trace_leading(const CMatrix& m, int traced) {
  const Eigen::Index kept = m.rows() / traced;
  CMatrix out = CMatrix::Zero(kept, kept);
  for (int t = 0; t < traced; ++t) out += m.block(t * kept, t * kept, kept, kept);
  return out;
}

CMatrix embed_operator(const CMatrix& op, const Labels& op_labels, const Labels& labels,
                       const Dims& dims) {
  // Order the full space as (op_labels..., rest...), build op (x) I, then
  // permute back.
  auto pos = positions_of(labels, op_labels);
  std::vector<int> order = pos;
  int rest_dim = 1;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i)
    if (std::find(pos.begin(), pos.end(), i) == pos.end()) {
      order.push_back(i);
      rest_dim *= dims[i];
    }
  CMatrix big = kron(op, CMatrix::Identity(rest_dim, rest_dim));
  Dims perm_dims(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) perm_dims[i] = dims[order[i]];
  // Inverse permutation takes the (op, rest) layout back to `labels` order.
  std::vector<int> inverse(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) inverse[order[i]] = static_cast<int>(i);
  return permute_matrix(big, perm_dims, inverse);
}

// ---------------------------------------------------------------------------

MultipartiteState tensor(const MultipartiteState& a, const MultipartiteState& b) {
  for (const auto& l : b.labels())
    if (a.has(l)) throw InputError("label collision on '" + l + "'");
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  Labels labels = a.labels();
  labels.insert(labels.end(), b.labels().begin(), b.labels().end());
  return MultipartiteState(std::move(dims), std::move(labels), kron(a.matrix(), b.matrix()));
}

MultipartiteState partial_trace(const MultipartiteState& s, const Labels& keep) {
  if (keep.empty()) throw InputError("partial_trace: keep set is empty");
  auto keep_pos = positions_of(s.labels(), keep);
  std::set<int> keep_set(keep_pos.begin(), keep_pos.end());
  if (keep_set.size() != keep_pos.size()) throw InputError("partial_trace: repeated label");
  std::vector<int> order(keep_set.begin(), keep_set.end());  // relative order kept
  int traced = 1;
  for (int i = 0; i < static_cast<int>(s.dims().size()); ++i)
    if (!keep_set.count(i)) {
      order.push_back(i);
      traced *= s.dims()[i];
    }
  CMatrix permuted = permute_matrix(s.matrix(), s.dims(), order);
  Dims dims;
  Labels labels;
  for (int i : keep_set) {
    dims.push_back(s.dims()[i]);
    labels.push_back(s.labels()[i]);
  }
  return MultipartiteState(std::move(dims), std::move(labels), trace_trailing(permuted, traced));
}

MultipartiteState permute_systems(const MultipartiteState& s, const Labels& new_order) {
  if (new_order.size() != s.labels().size())
    throw InputError("permute_systems: not a permutation of the labels");
  auto order = positions_of(s.labels(), new_order);
  std::set<int> seen(order.begin(), order.end());
  if (seen.size() != order.size())
    throw InputError("permute_systems: not a permutation of the labels");
  Dims dims(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) dims[i] = s.dims()[order[i]];
  return MultipartiteState(std::move(dims), new_order, permute_matrix(s.matrix(), s.dims(), order));
}

PureStateVector purify(const MultipartiteState& s, const std::string& ref_label) {
  if (s.has(ref_label)) throw InputError("purify: reference label already in use");
  HermitianEig e = hermitian_eig(s.matrix());
  const double cut = 1e-12;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = e.values.size() - 1; k >= 0; --k)
    if (e.values(k) > cut) keep.push_back(k);
  const int r = static_cast<int>(keep.size());
  const int n = s.dim();
  CVector amp = CVector::Zero(static_cast<Eigen::Index>(n) * r);
  for (int j = 0; j < r; ++j) {
    double w = std::sqrt(e.values(keep[j]));
    for (int i = 0; i < n; ++i) amp(i * r + j) = w * e.vectors(i, keep[j]);
  }
  Dims dims = s.dims();
  dims.push_back(r);
  Labels labels = s.labels();
  labels.push_back(ref_label);
  return PureStateVector(std::move(dims), std::move(labels), amp / amp.norm());
}

SchmidtDecomposition schmidt(const PureStateVector& v, const Labels& cut) {
  auto pos = positions_of(v.labels(), cut);
  std::set<int> cut_set(pos.begin(), pos.end());
  if (cut_set.empty() || cut_set.size() >= v.labels().size())
    throw InputError("schmidt: cut must be a nontrivial bipartition");
  std::vector<int> order(cut_set.begin(), cut_set.end());
  int left = 1, right = 1;
  for (int i : cut_set) left *= v.dims()[i];
  for (int i = 0; i < static_cast<int>(v.dims().size()); ++i)
    if (!cut_set.count(i)) {
      order.push_back(i);
      right *= v.dims()[i];
    }
  auto map = permutation_index_map(v.dims(), order);
  CMatrix psi(left, right);
  for (int a = 0; a < left; ++a)
    for (int b = 0; b < right; ++b) psi(a, b) = v.amplitudes()(map[a * right + b]);
  Eigen::JacobiSVD<CMatrix> svd(psi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  RVector s = svd.singularValues();
  int rank = 0;
  while (rank < s.size() && s(rank) > 1e-14) ++rank;
  SchmidtDecomposition out;
  out.coefficients = s.head(rank).cwiseAbs2();
  out.coefficients /= out.coefficients.sum();
  out.left = svd.matrixU().leftCols(rank);
  out.right = svd.matrixV().leftCols(rank).conjugate();
  return out;
}

double schatten_norm(const CMatrix& x, double alpha) {
  if (!(alpha >= 1.0)) throw InputError("schatten_norm: alpha must be >= 1");
  if (x.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(x);
  const RVector& s = svd.singularValues();
  if (std::isinf(alpha)) return s.maxCoeff();
  if (alpha == 1.0) return s.sum();
  double smax = s.maxCoeff();
  if (smax == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i) / smax, alpha);
  return smax * std::pow(acc, 1.0 / alpha);
}

// ---------------------------------------------------------------------------

PureStateVector random_pure(const Dims& dims, const Labels& labels, Rng& rng) {
  CVector v(product(dims));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal();
  return PureStateVector(dims, labels, v / v.norm());
}

MultipartiteState random_density(const Dims& dims, const Labels& labels, int rank, Rng& rng) {
  const int n = product(dims);
  if (rank < 1 || rank > n) throw InputError("random_density: rank out of range");
  CMatrix g(n, rank);
  for (int j = 0; j < rank; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng.complex_normal();
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return MultipartiteState(dims, labels, rho);
}

CMatrix random_isometry(int rows, int cols, Rng& rng) {
  if (cols > rows) throw InputError("random_isometry: cols > rows");
  CMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(rows, cols);
  CMatrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (int j = 0; j < cols; ++j) {
    cplx d = r(j, j);
    double a = std::abs(d);
    if (a > 0) q.col(j) *= d / a;
  }
  return q;
}

CMatrix random_unitary(int d, Rng& rng) { return random_isometry(d, d, rng); }

// ---------------------------------------------------------------------------

MultipartiteState basis_state(const Dims& dims, const Labels& labels,
                              const std::vector<int>& digits) {
  if (digits.size() != dims.size()) throw InputError("basis_state: digit count mismatch");
  int idx = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= dims[i]) throw InputError("basis_state: digit range");
    idx = idx * dims[i] + digits[i];
  }
  const int n = product(dims);
  CMatrix m = CMatrix::Zero(n, n);
  m(idx, idx) = 1.0;
  return MultipartiteState(dims, labels, m);
}

MultipartiteState maximally_mixed(const Dims& dims, const Labels& labels) {
  const int n = product(dims);
  return MultipartiteState(dims, labels, CMatrix::Identity(n, n) / static_cast<double>(n));
}

PureStateVector max_entangled_vector(int d, const std::string& a, const std::string& b) {
  CVector v = CVector::Zero(d * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return PureStateVector({d, d}, {a, b}, v);
}

MultipartiteState max_entangled(int d, const std::string& a, const std::string& b) {
  return max_entangled_vector(d, a, b).density();
}

MultipartiteState classical_copy(int d, const std::string& x, const std::string& b) {
  CMatrix m = CMatrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) m(i * d + i, i * d + i) = 1.0 / d;
  return MultipartiteState({d, d}, {x, b}, m);
}

PureStateVector ghz_vector(int parties, int d, const Labels& labels) {
  Dims dims(parties, d);
  CVector v = CVector::Zero(product(dims));
  int step = 0;
  for (int k = 0; k < parties; ++k) step = step * d + 1;
  for (int i = 0; i < d; ++i) v(i * step) = 1.0 / std::sqrt(static_cast<double>(d));
  return PureStateVector(dims, labels, v);
}

}  // namespace recoverlib
