#include "recoverlib/fidelity_program.hpp"

#include "recoverlib/channels.hpp"

namespace recoverlib {

namespace {

enum class BasisKind { diag, re, im };

struct HermBasis {
  BasisKind kind;
  int k;
  int l;
};

// Hermitian basis of n x n matrices: E_kk, E_kl + E_lk, i E_kl - i E_lk.
std::vector<HermBasis> hermitian_basis(int n) {
  std::vector<HermBasis> out;
  for (int k = 0; k < n; ++k) {
    out.push_back({BasisKind::diag, k, k});
    for (int l = k + 1; l < n; ++l) {
      out.push_back({BasisKind::re, k, l});
      out.push_back({BasisKind::im, k, l});
    }
  }
  return out;
}

CMatrix dense_basis(const HermBasis& h, int n) {
  CMatrix m = CMatrix::Zero(n, n);
  switch (h.kind) {
    case BasisKind::diag: m(h.k, h.k) = 1.0; break;
    case BasisKind::re: m(h.k, h.l) = m(h.l, h.k) = 1.0; break;
    case BasisKind::im:
      m(h.k, h.l) = cplx(0.0, 1.0);
      m(h.l, h.k) = cplx(0.0, -1.0);
      break;
  }
  return m;
}

sdp::HermEntry basis_entry(const HermBasis& h, int offset) {
  cplx v = h.kind == BasisKind::im ? cplx(0.0, 1.0) : cplx(1.0, 0.0);
  return {offset + h.k, offset + h.l, v};
}

// Tr(H C) for a basis element H.
double basis_trace(const HermBasis& h, const CMatrix& c) {
  switch (h.kind) {
    case BasisKind::diag: return c(h.k, h.k).real();
    case BasisKind::re: return 2.0 * c(h.k, h.l).real();
    case BasisKind::im: return 2.0 * c(h.k, h.l).imag();
  }
  return 0.0;
}

// One side of the block operator after compression by W.
struct Side {
  CMatrix w;
  CMatrix constant;  // W^dagger const W
  // variable id -> matrix of X -> W^dagger map(X) W, columns indexed by
  // r*m + c for the matrix unit E_rc, rows by k*n + l.
  std::vector<std::pair<int, CMatrix>> superops;
  int dim() const { return static_cast<int>(w.cols()); }
};

Side compress(const AffineOperator& op, const std::vector<int>& sizes,
              const std::vector<CMatrix>& interior) {
  CMatrix at_interior;
  int n = -1;
  if (op.constant.size() > 0) {
    at_interior = op.constant;
    n = static_cast<int>(op.constant.rows());
  }
  for (const auto& [var, map] : op.terms) {
    CMatrix img = map(interior.at(var));
    if (n < 0) {
      n = static_cast<int>(img.rows());
      at_interior = CMatrix::Zero(n, n);
    }
    if (img.rows() != n) throw InputError("affine operator terms disagree on dimension");
    at_interior += img;
  }
  if (n < 0) throw InputError("affine operator is empty");

  Side side;
  side.w = support_basis(hermitian_part(at_interior), kSupportCutoff);
  const int np = side.dim();
  side.constant = op.constant.size() > 0 ? CMatrix(side.w.adjoint() * op.constant * side.w)
                                         : CMatrix(CMatrix::Zero(np, np));
  for (const auto& [var, map] : op.terms) {
    const int m = sizes.at(var);
    CMatrix s(np * np, m * m);
    CMatrix unit = CMatrix::Zero(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) {
        unit(r, c) = 1.0;
        CMatrix img = side.w.adjoint() * map(unit) * side.w;
        unit(r, c) = 0.0;
        for (int k = 0; k < np; ++k)
          for (int l = 0; l < np; ++l) s(k * np + l, r * m + c) = img(k, l);
      }
    bool merged = false;
    for (auto& [v, existing] : side.superops)
      if (v == var) {
        existing += s;
        merged = true;
      }
    if (!merged) side.superops.emplace_back(var, std::move(s));
  }
  return side;
}

// Coefficient G with Tr(G X) = Tr(H map(X)), from the probed superoperator.
CMatrix adjoint_coefficient(const HermBasis& h, const CMatrix& s, int n, int m) {
  auto row = [&](int k, int l) {
    CMatrix g(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) g(c, r) = s(k * n + l, r * m + c);
    return g;
  };
  switch (h.kind) {
    case BasisKind::diag: return row(h.k, h.k);
    case BasisKind::re: return row(h.k, h.l) + row(h.l, h.k);
    case BasisKind::im:
      return cplx(0.0, -1.0) * row(h.k, h.l) + cplx(0.0, 1.0) * row(h.l, h.k);
  }
  return {};
}

void add_side_constraints(const Side& side, int offset, const std::vector<int>& sizes,
                          sdp::ComplexSdp& prog) {
  const int n = side.dim();
  for (const auto& h : hermitian_basis(n)) {
    sdp::ComplexConstraint con;
    con.terms.push_back({0, {basis_entry(h, offset)}});
    for (const auto& [var, s] : side.superops) {
      CMatrix g = adjoint_coefficient(h, s, n, sizes[var]);
      auto entries = sdp::from_dense(-hermitian_part(g), 1e-14);
      if (!entries.empty()) con.terms.push_back({var + 1, std::move(entries)});
    }
    con.rhs = basis_trace(h, side.constant);
    prog.constraints.push_back(std::move(con));
  }
}

}  // namespace

int FidelityProgram::add_variable(int size, CMatrix interior) {
  if (interior.rows() != size || interior.cols() != size)
    throw InputError("interior point has the wrong size");
  sizes_.push_back(size);
  interior_.push_back(std::move(interior));
  return static_cast<int>(sizes_.size()) - 1;
}

void FidelityProgram::add_matrix_equation(std::vector<std::pair<int, LinearMap>> adjoints,
                                          const CMatrix& rhs) {
  const int n = static_cast<int>(rhs.rows());
  for (const auto& h : hermitian_basis(n)) {
    CMatrix hm = dense_basis(h, n);
    sdp::ComplexConstraint con;
    for (const auto& [var, adj] : adjoints) {
      auto entries = sdp::from_dense(hermitian_part(adj(hm)), 1e-14);
      if (!entries.empty()) con.terms.push_back({var, std::move(entries)});
    }
    con.rhs = basis_trace(h, rhs);
    constraints_.push_back(std::move(con));
  }
}

void FidelityProgram::require_partial_trace_identity(int var, int in_dim, int out_dim) {
  if (sizes_.at(var) != in_dim * out_dim) throw InputError("Choi block has the wrong size");
  CMatrix id_out = CMatrix::Identity(out_dim, out_dim);
  add_matrix_equation({{var, [id_out](const CMatrix& h) { return kron(h, id_out); }}},
                      CMatrix::Identity(in_dim, in_dim));
}

void FidelityProgram::require_unit_trace(int var) {
  const int n = sizes_.at(var);
  sdp::ComplexConstraint con;
  for (int k = 0; k < n; ++k) {
    if (con.terms.empty()) con.terms.push_back({var, {}});
    con.terms[0].entries.push_back({k, k, cplx(1.0, 0.0)});
  }
  con.rhs = 1.0;
  constraints_.push_back(std::move(con));
}

void FidelityProgram::require_sum_identity(const std::vector<int>& vars) {
  if (vars.empty()) throw InputError("empty sum");
  const int n = sizes_.at(vars.front());
  std::vector<std::pair<int, LinearMap>> adj;
  for (int v : vars) {
    if (sizes_.at(v) != n) throw InputError("blocks in a sum must have equal size");
    adj.emplace_back(v, [](const CMatrix& h) { return h; });
  }
  add_matrix_equation(std::move(adj), CMatrix::Identity(n, n));
}

void FidelityProgram::require_partial_transpose(int image, int var, int in_dim, int out_dim) {
  add_matrix_equation(
      {{image, [](const CMatrix& h) { return h; }},
       {var,
        [in_dim, out_dim](const CMatrix& h) {
          return CMatrix(-partial_transpose_output(h, in_dim, out_dim));
        }}},
      CMatrix::Zero(in_dim * out_dim, in_dim * out_dim));
}

FidelityOutcome FidelityProgram::maximize(const AffineOperator& p, const AffineOperator& q,
                                          const sdp::SdpOptions& options) const {
  Side sp = compress(p, sizes_, interior_);
  Side sq = compress(q, sizes_, interior_);
  const int a = sp.dim();
  const int b = sq.dim();

  sdp::ComplexSdp prog;
  prog.add_block(a + b);
  for (int s : sizes_) prog.add_block(s);

  // -Re Tr(K Z'), K = Wq^dagger Wp, with Z' the off-diagonal block.
  CMatrix k = sq.w.adjoint() * sp.w;
  std::vector<sdp::HermEntry> obj;
  for (int r = 0; r < a; ++r)
    for (int c = 0; c < b; ++c) {
      cplx v = -0.5 * std::conj(k(c, r));
      if (std::abs(v) > 1e-15) obj.push_back({r, a + c, v});
    }
  prog.objective[0] = std::move(obj);

  add_side_constraints(sp, 0, sizes_, prog);
  add_side_constraints(sq, a, sizes_, prog);
  for (auto con : constraints_) {
    for (auto& t : con.terms) t.block += 1;
    prog.constraints.push_back(std::move(con));
  }

  sdp::ComplexSdpSolution sol = sdp::solve(prog, options);
  FidelityOutcome out;
  out.root_fidelity = -sol.primal_objective;
  out.root_fidelity_bound = -sol.dual_objective;
  for (std::size_t v = 1; v < sol.x.size(); ++v) out.variables.push_back(sol.x[v]);
  out.primal_infeasibility = sol.primal_infeasibility;
  out.dual_infeasibility = sol.dual_infeasibility;
  out.iterations = sol.iterations;
  out.status = sol.status;
  return out;
}

}  // namespace recoverlib
