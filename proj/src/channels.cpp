#include "recoverlib/channels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace recoverlib {

namespace {

constexpr double kChoiPsdTol = 1e-8;
constexpr double kTpTol = 1e-8;

std::vector<int> positions(const Labels& labels, const Labels& wanted) {
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

QuantumChannel::QuantumChannel(Dims in_dims, Dims out_dims, CMatrix choi)
    : in_dims_(std::move(in_dims)), out_dims_(std::move(out_dims)) {
  const int din = product(in_dims_), dout = product(out_dims_);
  if (choi.rows() != din * dout || choi.cols() != din * dout)
    throw InputError("Choi matrix size does not match channel dimensions");
  if (max_asymmetry(choi) > 1e-8) throw InputError("Choi matrix not Hermitian");
  choi_ = hermitian_part(choi);
  double lmin = min_eigenvalue(choi_);
  if (lmin < -kChoiPsdTol * std::max(1.0, static_cast<double>(din))) {
    std::ostringstream os;
    os << "channel not completely positive: Choi eigenvalue " << lmin;
    throw InputError(os.str());
  }
  CMatrix tp = choi_input_marginal(choi_, din, dout) - CMatrix::Identity(din, din);
  if (tp.cwiseAbs().maxCoeff() > kTpTol) {
    std::ostringstream os;
    os << "channel not trace preserving: |Tr_out J - I| = " << tp.cwiseAbs().maxCoeff();
    throw InputError(os.str());
  }
}

CMatrix QuantumChannel::operator()(const CMatrix& x) const {
  return apply_choi(choi_, in_dim(), out_dim(), x);
}

Povm::Povm(std::vector<CMatrix> effects) : effects_(std::move(effects)) {
  if (effects_.empty()) throw InputError("POVM needs at least one effect");
  const auto d = effects_.front().rows();
  CMatrix sum = CMatrix::Zero(d, d);
  for (auto& e : effects_) {
    if (e.rows() != d || e.cols() != d) throw InputError("POVM effects differ in size");
    if (max_asymmetry(e) > 1e-9) throw InputError("POVM effect not Hermitian");
    e = hermitian_part(e);
    if (min_eigenvalue(e) < -1e-9) throw InputError("POVM effect not PSD");
    sum += e;
  }
  if ((sum - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-8)
    throw InputError("POVM effects do not sum to identity");
}

Isometry::Isometry(Dims in_dims, Dims out_dims, CMatrix matrix)
    : in_dims_(std::move(in_dims)), out_dims_(std::move(out_dims)), matrix_(std::move(matrix)) {
  const int din = product(in_dims_), dout = product(out_dims_);
  if (matrix_.rows() != dout || matrix_.cols() != din)
    throw InputError("isometry shape does not match dimensions");
  if ((matrix_.adjoint() * matrix_ - CMatrix::Identity(din, din)).cwiseAbs().maxCoeff() > 1e-9)
    throw InputError("matrix is not an isometry");
}

// ---------------------------------------------------------------------------

CMatrix apply_choi(const CMatrix& choi, int in_dim, int out_dim, const CMatrix& m) {
  const int r = static_cast<int>(m.rows()) / in_dim;
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(r) * out_dim,
                              static_cast<Eigen::Index>(r) * out_dim);
  // out[(a,o),(b,o')] = sum_{i,j} m[(a,i),(b,j)] J[(i,o),(j,o')]
  for (int i = 0; i < in_dim; ++i)
    for (int j = 0; j < in_dim; ++j) {
      auto jblock = choi.block(i * out_dim, j * out_dim, out_dim, out_dim);
      if (jblock.cwiseAbs().maxCoeff() == 0.0) continue;
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) {
          cplx c = m(a * in_dim + i, b * in_dim + j);
          if (c == cplx(0.0)) continue;
          out.block(a * out_dim, b * out_dim, out_dim, out_dim) += c * jblock;
        }
    }
  return out;
}

CMatrix choi_from_kraus(const std::vector<CMatrix>& kraus) {
  const auto dout = kraus.front().rows(), din = kraus.front().cols();
  CMatrix j = CMatrix::Zero(din * dout, din * dout);
  for (const auto& k : kraus) {
    // vec_k[(i,o)] = K(o,i)
    CVector v(din * dout);
    for (Eigen::Index i = 0; i < din; ++i)
      for (Eigen::Index o = 0; o < dout; ++o) v(i * dout + o) = k(o, i);
    j.noalias() += v * v.adjoint();
  }
  return j;
}

CMatrix choi_input_marginal(const CMatrix& choi, int in_dim, int out_dim) {
  (void)in_dim;
  return trace_trailing(choi, out_dim);
}

CMatrix partial_transpose_output(const CMatrix& choi, int in_dim, int out_dim) {
  CMatrix out(choi.rows(), choi.cols());
  for (int i = 0; i < in_dim; ++i)
    for (int j = 0; j < in_dim; ++j)
      out.block(i * out_dim, j * out_dim, out_dim, out_dim) =
          choi.block(i * out_dim, j * out_dim, out_dim, out_dim).transpose();
  return out;
}

bool is_cptp(const CMatrix& choi, int in_dim, int out_dim, double tol) {
  if (min_eigenvalue(choi) < -tol) return false;
  CMatrix tp = choi_input_marginal(choi, in_dim, out_dim) - CMatrix::Identity(in_dim, in_dim);
  return tp.cwiseAbs().maxCoeff() <= tol;
}

// ---------------------------------------------------------------------------

MultipartiteState apply(const QuantumChannel& ch, const MultipartiteState& s,
                        const Labels& target, const Labels& out_labels_in) {
  auto tpos = positions(s.labels(), target);
  Dims tdims;
  for (int p : tpos) tdims.push_back(s.dims()[p]);
  if (tdims != ch.in_dims())
    throw InputError("apply: target dimensions do not match channel input");
  Labels out_labels = out_labels_in;
  if (out_labels.empty()) {
    if (ch.out_dims().size() != target.size())
      throw InputError("apply: output labels required when subsystem counts change");
    out_labels = target;
  }
  if (out_labels.size() != ch.out_dims().size())
    throw InputError("apply: output label count does not match channel output");

  // Bring the state to (rest..., target...) order.
  std::vector<int> order;
  Dims rest_dims;
  Labels rest_labels;
  for (int i = 0; i < static_cast<int>(s.labels().size()); ++i)
    if (std::find(tpos.begin(), tpos.end(), i) == tpos.end()) {
      order.push_back(i);
      rest_dims.push_back(s.dims()[i]);
      rest_labels.push_back(s.labels()[i]);
    }
  order.insert(order.end(), tpos.begin(), tpos.end());
  CMatrix m = permute_matrix(s.matrix(), s.dims(), order);
  CMatrix out = apply_choi(ch.choi(), ch.in_dim(), ch.out_dim(), m);

  // Layout now (rest..., out...). Final layout: original order with the
  // target block replaced by the outputs at the first target position.
  Labels cur_labels = rest_labels;
  cur_labels.insert(cur_labels.end(), out_labels.begin(), out_labels.end());
  Dims cur_dims = rest_dims;
  cur_dims.insert(cur_dims.end(), ch.out_dims().begin(), ch.out_dims().end());
  for (const auto& l : out_labels)
    if (std::find(rest_labels.begin(), rest_labels.end(), l) != rest_labels.end())
      throw InputError("apply: output label collides with an untouched subsystem");

  int first = *std::min_element(tpos.begin(), tpos.end());
  Labels final_labels;
  for (int i = 0; i < static_cast<int>(s.labels().size()); ++i) {
    if (i == first) final_labels.insert(final_labels.end(), out_labels.begin(), out_labels.end());
    if (std::find(tpos.begin(), tpos.end(), i) == tpos.end())
      final_labels.push_back(s.labels()[i]);
  }
  MultipartiteState cur(cur_dims, cur_labels, hermitian_part(out));
  if (final_labels == cur_labels) return cur;
  return permute_systems(cur, final_labels);
}

QuantumChannel kraus_to_choi(const std::vector<CMatrix>& kraus, const Dims& in_dims,
                             const Dims& out_dims) {
  if (kraus.empty()) throw InputError("kraus_to_choi: empty Kraus set");
  const int din = product(in_dims), dout = product(out_dims);
  CMatrix comp = CMatrix::Zero(din, din);
  for (const auto& k : kraus) {
    if (k.rows() != dout || k.cols() != din)
      throw InputError("kraus_to_choi: Kraus operator shape mismatch");
    comp += k.adjoint() * k;
  }
  if ((comp - CMatrix::Identity(din, din)).cwiseAbs().maxCoeff() > 1e-8)
    throw InputError("kraus_to_choi: Kraus operators are not trace preserving");
  return QuantumChannel(in_dims, out_dims, choi_from_kraus(kraus));
}

std::vector<CMatrix> choi_to_kraus(const QuantumChannel& ch) {
  const int din = ch.in_dim(), dout = ch.out_dim();
  HermitianEig e = hermitian_eig(ch.choi());
  double lmax = e.values.maxCoeff();
  std::vector<CMatrix> kraus;
  for (Eigen::Index k = e.values.size() - 1; k >= 0; --k) {
    if (e.values(k) <= 1e-12 * std::max(lmax, 1.0)) continue;
    CMatrix op(dout, din);
    double w = std::sqrt(e.values(k));
    for (int i = 0; i < din; ++i)
      for (int o = 0; o < dout; ++o) op(o, i) = w * e.vectors(i * dout + o, k);
    kraus.push_back(op);
  }
  return kraus;
}

QuantumChannel identity_channel(const Dims& dims) {
  const int d = product(dims);
  return QuantumChannel(dims, dims, choi_from_kraus({CMatrix::Identity(d, d)}));
}

QuantumChannel unitary_channel(const CMatrix& u, const Dims& dims) {
  return kraus_to_choi({u}, dims, dims);
}

QuantumChannel isometry_channel(const Isometry& v) {
  return QuantumChannel(v.in_dims(), v.out_dims(), choi_from_kraus({v.matrix()}));
}

QuantumChannel replacement_channel(const Dims& in_dims, const CMatrix& tau,
                                   const Dims& out_dims) {
  const int din = product(in_dims);
  return QuantumChannel(in_dims, out_dims, kron(CMatrix::Identity(din, din), tau));
}

QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first) {
  if (first.out_dim() != second.in_dim()) throw InputError("compose: dimension mismatch");
  // Apply `second` to the output half of the first Choi matrix.
  CMatrix j = apply_choi(second.choi(), second.in_dim(), second.out_dim(), first.choi());
  return QuantumChannel(first.in_dims(), second.out_dims(), j);
}

QuantumChannel tensor_channels(const QuantumChannel& a, const QuantumChannel& b) {
  // Choi of the product lives on (inA inB outA outB) after reordering
  // (inA outA inB outB).
  CMatrix k = kron(a.choi(), b.choi());
  Dims d = {a.in_dim(), a.out_dim(), b.in_dim(), b.out_dim()};
  CMatrix j = permute_matrix(k, d, {0, 2, 1, 3});
  Dims in = a.in_dims();
  in.insert(in.end(), b.in_dims().begin(), b.in_dims().end());
  Dims out = a.out_dims();
  out.insert(out.end(), b.out_dims().begin(), b.out_dims().end());
  return QuantumChannel(in, out, j);
}

QuantumChannel random_channel(const Dims& in_dims, const Dims& out_dims, int kraus_count,
                              Rng& rng) {
  const int din = product(in_dims), dout = product(out_dims);
  CMatrix v = random_isometry(dout * kraus_count, din, rng);
  std::vector<CMatrix> kraus;
  for (int k = 0; k < kraus_count; ++k) {
    CMatrix op(dout, din);
    for (int o = 0; o < dout; ++o) op.row(o) = v.row(o * kraus_count + k);
    kraus.push_back(op);
  }
  return kraus_to_choi(kraus, in_dims, out_dims);
}

// ---------------------------------------------------------------------------

namespace {

struct PetzParts {
  CMatrix rho_ac;  // ordered (A, C)
  CMatrix rho_c;
  int da, dc;
  Dims a_dims, c_dims;
};

PetzParts petz_parts(const MultipartiteState& rho_AC, const Labels& recover, const Labels& from) {
  Labels order = recover;
  order.insert(order.end(), from.begin(), from.end());
  if (order.size() != rho_AC.labels().size())
    throw InputError("petz_recovery: labels must partition the state");
  MultipartiteState s = permute_systems(rho_AC, order);
  PetzParts p;
  for (const auto& l : recover) p.a_dims.push_back(s.dim_of(l));
  for (const auto& l : from) p.c_dims.push_back(s.dim_of(l));
  p.da = product(p.a_dims);
  p.dc = product(p.c_dims);
  p.rho_ac = s.matrix();
  p.rho_c = trace_leading(p.rho_ac, p.da);
  return p;
}

}  // namespace

int petz_kernel_rank(const MultipartiteState& rho_AC, const Labels& from) {
  Labels recover;
  for (const auto& l : rho_AC.labels())
    if (std::find(from.begin(), from.end(), l) == from.end()) recover.push_back(l);
  PetzParts p = petz_parts(rho_AC, recover, from);
  return p.dc - static_cast<int>(support_basis(p.rho_c, 1e-10).cols());
}

QuantumChannel petz_recovery(const MultipartiteState& rho_AC, const Labels& recover,
                             const Labels& from) {
  PetzParts p = petz_parts(rho_AC, recover, from);
  const int da = p.da, dc = p.dc;
  CMatrix sqrt_ac = psd_sqrt(p.rho_ac);
  CMatrix inv_sqrt_c = psd_power(p.rho_c, -0.5, 1e-10);
  CMatrix x = sqrt_ac * kron(CMatrix::Identity(da, da), inv_sqrt_c);
  std::vector<CMatrix> kraus;
  for (int a = 0; a < da; ++a) {
    // K_a = X (|a> (x) I_C): columns a*dc .. a*dc+dc-1 of X.
    kraus.push_back(x.middleCols(a * dc, dc));
  }
  // Kernel of rho_C: measure-and-prepare rho_AC.
  // Taken from the eigenvectors directly: a relative cutoff on I - P P^dagger
  // would keep rounding noise when rho_C is full rank.
  HermitianEig ec = hermitian_eig(p.rho_c);
  const double cut = 1e-10 * std::max(ec.values.maxCoeff(), 0.0);
  std::vector<Eigen::Index> ker_idx;
  for (Eigen::Index k = 0; k < ec.values.size(); ++k)
    if (!(ec.values(k) > cut && ec.values(k) > 0.0)) ker_idx.push_back(k);
  CMatrix ker = ec.vectors(Eigen::all, ker_idx);
  if (ker.cols() > 0) {
    HermitianEig e = hermitian_eig(p.rho_ac);
    for (Eigen::Index k = 0; k < e.values.size(); ++k) {
      if (e.values(k) <= 1e-14) continue;
      for (Eigen::Index l = 0; l < ker.cols(); ++l)
        kraus.push_back(std::sqrt(e.values(k)) * e.vectors.col(k) * ker.col(l).adjoint());
    }
  }
  Dims out = p.a_dims;
  out.insert(out.end(), p.c_dims.begin(), p.c_dims.end());
  CMatrix j = choi_from_kraus(kraus);
  // Absorb the residual of the pseudo-inverse on the support.
  CMatrix tp = choi_input_marginal(j, dc, da * dc);
  CMatrix corr = psd_power(tp, -0.5, 1e-12);
  CMatrix fix = kron(corr, CMatrix::Identity(da * dc, da * dc));
  j = fix * j * fix;
  return QuantumChannel(p.c_dims, out, j);
}

QuantumChannel isometry_inverse_channel(const Isometry& v, const MultipartiteState& tau) {
  const CMatrix& m = v.matrix();
  const auto dout = m.rows(), din = m.cols();
  if (tau.dim() != din) throw InputError("isometry_inverse_channel: tau dimension mismatch");
  CMatrix perp = CMatrix::Identity(dout, dout) - m * m.adjoint();
  CMatrix j = CMatrix::Zero(dout * din, dout * din);
  for (Eigen::Index i = 0; i < dout; ++i)
    for (Eigen::Index k = 0; k < dout; ++k) {
      // T(|i><k|) = V^dagger |i><k| V + <k|perp|i> tau
      CMatrix blk = m.row(i).adjoint() * m.row(k) + perp(k, i) * tau.matrix();
      j.block(i * din, k * din, din, din) = blk;
    }
  return QuantumChannel(v.out_dims(), v.in_dims(), j);
}

QuantumChannel measurement_channel(const Povm& p) {
  const int n = p.outcomes();
  std::vector<CMatrix> preps;
  for (int x = 0; x < n; ++x) {
    CMatrix e = CMatrix::Zero(n, n);
    e(x, x) = 1.0;
    preps.push_back(e);
  }
  return eb_channel(p, preps);
}

Isometry measurement_isometry(const Povm& p) {
  const int d = p.dim();
  struct Ray {
    int x;
    CVector phi;
  };
  std::vector<Ray> rays;
  for (int x = 0; x < p.outcomes(); ++x) {
    HermitianEig e = hermitian_eig(p.effects()[x]);
    for (Eigen::Index k = e.values.size() - 1; k >= 0; --k) {
      if (e.values(k) <= 1e-12) continue;
      CVector v = e.vectors.col(k);
      Eigen::Index imax = 0;
      v.cwiseAbs().maxCoeff(&imax);
      v *= std::conj(v(imax)) / std::abs(v(imax));
      rays.push_back({x, std::sqrt(e.values(k)) * v});
    }
  }
  const int nx = p.outcomes();
  const int ne = static_cast<int>(rays.size());
  CMatrix u = CMatrix::Zero(static_cast<Eigen::Index>(nx) * ne, d);
  for (int r = 0; r < ne; ++r) u.row(rays[r].x * ne + r) = rays[r].phi.adjoint();
  return Isometry({d}, {nx, ne}, u);
}

QuantumChannel eb_channel(const Povm& p, const std::vector<CMatrix>& preparations) {
  if (preparations.size() != static_cast<std::size_t>(p.outcomes()))
    throw InputError("eb_channel: one preparation per effect required");
  const auto dout = preparations.front().rows();
  CMatrix j = CMatrix::Zero(p.dim() * dout, p.dim() * dout);
  for (int x = 0; x < p.outcomes(); ++x) {
    if (preparations[x].rows() != dout) throw InputError("eb_channel: preparation sizes differ");
    j += kron(p.effects()[x].transpose(), preparations[x]);
  }
  return QuantumChannel({p.dim()}, {static_cast<int>(dout)}, j);
}

QuantumChannel dephasing_channel(int dim, const CMatrix& basis) {
  if (basis.rows() != dim || basis.cols() != dim)
    throw InputError("dephasing_channel: basis must be a dim x dim matrix");
  if ((basis.adjoint() * basis - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-9)
    throw InputError("dephasing_channel: basis is not orthonormal");
  std::vector<CMatrix> effects;
  for (int i = 0; i < dim; ++i) effects.push_back(basis.col(i) * basis.col(i).adjoint());
  return eb_channel(Povm(effects), effects);
}

MultipartiteState private_state(int key_dim, const Dims& shield_dims,
                                const std::vector<CMatrix>& twisting,
                                const MultipartiteState& sigma_shield) {
  if (shield_dims.size() != 2) throw InputError("private_state: need two shield dimensions");
  const int ds = product(shield_dims);
  if (sigma_shield.dim() != ds) throw InputError("private_state: shield state dimension");
  if (static_cast<int>(twisting.size()) != key_dim)
    throw InputError("private_state: one twisting unitary per key value");
  for (const auto& v : twisting)
    if (v.rows() != ds || v.cols() != ds ||
        (v.adjoint() * v - CMatrix::Identity(ds, ds)).cwiseAbs().maxCoeff() > 1e-9)
      throw InputError("private_state: twisting operator is not a unitary on the shield");
  const int d = key_dim;
  CMatrix base = kron(max_entangled(d).matrix(), sigma_shield.matrix());
  CMatrix u = CMatrix::Zero(d * d * ds, d * d * ds);
  for (int i = 0; i < d; ++i) {
    CMatrix proj = CMatrix::Zero(d, d);
    proj(i, i) = 1.0;
    u += kron(kron(proj, CMatrix::Identity(d, d)), twisting[i]);
  }
  return MultipartiteState({d, d, shield_dims[0], shield_dims[1]}, {"A", "B", "A'", "B'"},
                           u * base * u.adjoint());
}

Isometry stinespring(const QuantumChannel& ch) {
  auto kraus = choi_to_kraus(ch);
  const int din = ch.in_dim(), dout = ch.out_dim();
  const int ne = static_cast<int>(kraus.size());
  CMatrix u(static_cast<Eigen::Index>(dout) * ne, din);
  for (int o = 0; o < dout; ++o)
    for (int k = 0; k < ne; ++k) u.row(o * ne + k) = kraus[k].row(o);
  // Re-orthonormalize to absorb the Choi TP tolerance.
  CMatrix g = u.adjoint() * u;
  u = u * psd_power(g, -0.5, 0.0);
  Dims out = ch.out_dims();
  out.push_back(ne);
  return Isometry(ch.in_dims(), out, u);
}

Povm computational_povm(int d) {
  std::vector<CMatrix> e;
  for (int i = 0; i < d; ++i) {
    CMatrix m = CMatrix::Zero(d, d);
    m(i, i) = 1.0;
    e.push_back(m);
  }
  return Povm(e);
}

Povm random_povm(int dim, int outcomes, Rng& rng) {
  if (outcomes < dim) throw InputError("random_povm: need at least dim outcomes");
  CMatrix v = random_isometry(outcomes, dim, rng);
  std::vector<CMatrix> e;
  for (int x = 0; x < outcomes; ++x) {
    CVector r = v.row(x).adjoint();
    e.push_back(r * r.adjoint());
  }
  return Povm(e);
}

}  // namespace recoverlib
