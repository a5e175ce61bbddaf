#include "recoverlib/sdp.hpp"

#include "recoverlib/kernels.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace recoverlib::sdp {

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::max_iterations: return "max-iterations";
    case SdpStatus::stalled: return "stalled";
    case SdpStatus::numerical_error: return "numerical-error";
  }
  return "unknown";
}

namespace {

using Blocks = std::vector<RMatrix>;

double inner(const Blocks& a, const Blocks& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k].cwiseProduct(b[k]).sum();
  return acc;
}

double frob(const Blocks& a) { return std::sqrt(inner(a, a)); }

Blocks sym(Blocks a) {
  for (auto& m : a) m = 0.5 * (m + m.transpose()).eval();
  return a;
}

// Largest step t <= 1 (scaled by the caller) with X + t dX PSD. Returns
// +inf when every direction is admissible.
double max_step(const RMatrix& x, const RMatrix& dx) {
  Eigen::LLT<RMatrix> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  RMatrix l = llt.matrixL();
  RMatrix t = l.triangularView<Eigen::Lower>().solve(dx);
  t = l.triangularView<Eigen::Lower>().solve(t.transpose()).eval();
  t = 0.5 * (t + t.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RMatrix> es(t, Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

double max_step(const Blocks& x, const Blocks& dx) {
  double t = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) t = std::min(t, max_step(x[k], dx[k]));
  return t;
}

bool invert_spd(const Blocks& s, Blocks& inv) {
  inv.resize(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    Eigen::LLT<RMatrix> llt(s[k]);
    if (llt.info() != Eigen::Success) return false;
    inv[k] = llt.solve(RMatrix::Identity(s[k].rows(), s[k].cols()));
    inv[k] = 0.5 * (inv[k] + inv[k].transpose()).eval();
  }
  return true;
}

Blocks mul(const Blocks& a, const Blocks& b) {
  Blocks out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
  return out;
}

}  // namespace

SdpSolution solve(const RealSdp& p, const SdpOptions& opt) {
  const int nb = static_cast<int>(p.block_sizes.size());
  const int m = p.constraint_count();
  int total_dim = 0;
  for (int n : p.block_sizes) total_dim += n;

  // Norms for the starting point and relative residuals.
  std::vector<std::vector<double>> a_norm(m, std::vector<double>(nb, 0.0));
  for (int i = 0; i < m; ++i)
    for (const auto& e : p.constraints[i])
      a_norm[i][e.block] += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
  double c_norm = frob(p.objective);
  double b_norm = p.rhs.norm();

  Blocks x(nb), s(nb);
  for (int b = 0; b < nb; ++b) {
    const double n = p.block_sizes[b];
    double xi = std::max(10.0, std::sqrt(n));
    double eta = std::max({10.0, std::sqrt(n), p.objective[b].norm()});
    for (int i = 0; i < m; ++i) {
      double an = std::sqrt(a_norm[i][b]);
      if (an == 0.0) continue;
      xi = std::max(xi, n * (1.0 + std::abs(p.rhs(i))) / (1.0 + an));
      eta = std::max(eta, an);
    }
    eta = (1.0 + eta) / std::sqrt(n);
    x[b] = xi * RMatrix::Identity(p.block_sizes[b], p.block_sizes[b]);
    s[b] = eta * RMatrix::Identity(p.block_sizes[b], p.block_sizes[b]);
  }
  RVector y = RVector::Zero(m);

  SdpSolution sol;
  sol.status = SdpStatus::max_iterations;
  int small_steps = 0;

  for (int it = 0; it <= opt.max_iterations; ++it) {
    RVector rp = p.rhs - kernels::apply_constraints(p, x, opt.parallel);
    Blocks aty = kernels::adjoint_constraints(p, y);
    Blocks rd(nb);
    for (int b = 0; b < nb; ++b) rd[b] = p.objective[b] - s[b] - aty[b];

    const double pobj = inner(p.objective, x);
    const double dobj = p.rhs.dot(y);
    const double mu = inner(x, s) / total_dim;
    const double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double pinf = rp.norm() / (1.0 + b_norm);
    const double dinf = frob(rd) / (1.0 + c_norm);

    sol.x = x;
    sol.s = s;
    sol.y = y;
    sol.primal_objective = pobj;
    sol.dual_objective = dobj;
    sol.primal_infeasibility = pinf;
    sol.dual_infeasibility = dinf;
    sol.iterations = it;

    if (rel_gap < opt.gap_tol && pinf < opt.feas_tol && dinf < opt.feas_tol &&
        mu * total_dim / (1.0 + std::abs(pobj) + std::abs(dobj)) < opt.gap_tol) {
      sol.status = SdpStatus::optimal;
      return sol;
    }
    if (it == opt.max_iterations) break;

    Blocks s_inv;
    if (!invert_spd(s, s_inv)) {
      sol.status = SdpStatus::numerical_error;
      return sol;
    }
    RMatrix schur = kernels::schur_complement(p, x, s_inv, opt.parallel);
    Eigen::LLT<RMatrix> chol(schur);
    if (chol.info() != Eigen::Success) {
      double reg = 1e-14 * std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
      schur.diagonal().array() += reg;
      chol.compute(schur);
      if (chol.info() != Eigen::Success) {
        sol.status = SdpStatus::numerical_error;
        return sol;
      }
    }

    // X Rd Sinv is shared by both solves.
    Blocks x_rd_sinv = mul(mul(x, rd), s_inv);
    RVector a_x_rd_sinv = kernels::apply_constraints(p, x_rd_sinv, opt.parallel);

    // Solve for a given (R_c Sinv).
    auto direction = [&](const Blocks& rc_sinv, Blocks& dx, RVector& dy, Blocks& ds) {
      RVector rhs = rp - kernels::apply_constraints(p, rc_sinv, opt.parallel) + a_x_rd_sinv;
      dy = chol.solve(rhs);
      Blocks ady = kernels::adjoint_constraints(p, dy);
      ds.resize(nb);
      for (int b = 0; b < nb; ++b) ds[b] = rd[b] - ady[b];
      dx.resize(nb);
      for (int b = 0; b < nb; ++b) dx[b] = rc_sinv[b] - x[b] * ds[b] * s_inv[b];
      dx = sym(dx);
    };

    // Predictor (sigma = 0): R_c Sinv = -X.
    Blocks neg_x(nb);
    for (int b = 0; b < nb; ++b) neg_x[b] = -x[b];
    Blocks dx_a, ds_a;
    RVector dy_a;
    direction(neg_x, dx_a, dy_a, ds_a);
    double ap = std::min(1.0, max_step(x, dx_a));
    double ad = std::min(1.0, max_step(s, ds_a));
    Blocks x_a(nb), s_a(nb);
    for (int b = 0; b < nb; ++b) {
      x_a[b] = x[b] + ap * dx_a[b];
      s_a[b] = s[b] + ad * ds_a[b];
    }
    double mu_aff = inner(x_a, s_a) / total_dim;
    double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0);
    if (pinf > 1e-3 || dinf > 1e-3) sigma = std::max(sigma, 0.1 * (1.0 - std::min(ap, ad)));

    // Corrector: R_c Sinv = sigma mu Sinv - X - dXa dSa Sinv.
    Blocks rc_sinv(nb);
    for (int b = 0; b < nb; ++b)
      rc_sinv[b] = sigma * mu * s_inv[b] - x[b] - dx_a[b] * ds_a[b] * s_inv[b];
    Blocks dx, ds;
    RVector dy;
    direction(rc_sinv, dx, dy, ds);

    const double gamma = 0.9 + 0.09 * std::min(ap, ad);
    double tp = std::min(1.0, gamma * max_step(x, dx));
    double td = std::min(1.0, gamma * max_step(s, ds));
    if (tp < 1e-10 && td < 1e-10) {
      if (++small_steps >= 3) {
        sol.status = SdpStatus::stalled;
        return sol;
      }
    } else {
      small_steps = 0;
    }
    for (int b = 0; b < nb; ++b) {
      x[b] += tp * dx[b];
      s[b] += td * ds[b];
      x[b] = 0.5 * (x[b] + x[b].transpose()).eval();
      s[b] = 0.5 * (s[b] + s[b].transpose()).eval();
    }
    y += td * dy;
  }
  return sol;
}

// ---------------------------------------------------------------------------

int ComplexSdp::add_block(int size) {
  block_sizes.push_back(size);
  objective.emplace_back();
  return static_cast<int>(block_sizes.size()) - 1;
}

CMatrix to_dense(const std::vector<HermEntry>& entries, int size) {
  CMatrix m = CMatrix::Zero(size, size);
  for (const auto& e : entries) {
    m(e.row, e.col) += e.value;
    if (e.row != e.col) m(e.col, e.row) += std::conj(e.value);
  }
  return m;
}

std::vector<HermEntry> from_dense(const CMatrix& m, double drop) {
  std::vector<HermEntry> out;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r <= c; ++r) {
      cplx v = m(r, c);
      if (r == c) v = cplx(v.real(), 0.0);
      if (std::abs(v) > drop) out.push_back({static_cast<int>(r), static_cast<int>(c), v});
    }
  return out;
}

namespace {

// Half of the real embedding of a Hermitian entry list, so that
// realified(A) . realified(X) = Tr(A X).
void realify_entries(int block, int n, const std::vector<HermEntry>& entries,
                     std::vector<SymEntry>& out) {
  for (const auto& e : entries) {
    const double x = 0.5 * e.value.real();
    const double y = 0.5 * e.value.imag();
    if (e.row == e.col) {
      if (x != 0.0) {
        out.push_back({block, e.row, e.row, x});
        out.push_back({block, n + e.row, n + e.row, x});
      }
      continue;
    }
    if (x != 0.0) {
      out.push_back({block, e.row, e.col, x});
      out.push_back({block, n + e.row, n + e.col, x});
    }
    if (y != 0.0) {
      out.push_back({block, e.row, n + e.col, -y});
      out.push_back({block, e.col, n + e.row, y});
    }
  }
}

}  // namespace

RealSdp realify(const ComplexSdp& cp) {
  RealSdp rp;
  const int nb = static_cast<int>(cp.block_sizes.size());
  for (int b = 0; b < nb; ++b) {
    const int n = cp.block_sizes[b];
    rp.block_sizes.push_back(2 * n);
    RMatrix c = RMatrix::Zero(2 * n, 2 * n);
    if (b < static_cast<int>(cp.objective.size())) {
      std::vector<SymEntry> tmp;
      realify_entries(b, n, cp.objective[b], tmp);
      for (const auto& e : tmp) {
        c(e.row, e.col) += e.value;
        if (e.row != e.col) c(e.col, e.row) += e.value;
      }
    }
    rp.objective.push_back(c);
  }
  rp.rhs.resize(static_cast<Eigen::Index>(cp.constraints.size()));
  for (std::size_t i = 0; i < cp.constraints.size(); ++i) {
    std::vector<SymEntry> entries;
    for (const auto& term : cp.constraints[i].terms)
      realify_entries(term.block, cp.block_sizes[term.block], term.entries, entries);
    std::stable_sort(entries.begin(), entries.end(),
                     [](const SymEntry& a, const SymEntry& b) { return a.block < b.block; });
    rp.constraints.push_back(std::move(entries));
    rp.rhs(static_cast<Eigen::Index>(i)) = cp.constraints[i].rhs;
  }
  return rp;
}

ComplexSdpSolution solve(const ComplexSdp& problem, const SdpOptions& options) {
  RealSdp rp = realify(problem);
  SdpSolution rs = solve(rp, options);
  ComplexSdpSolution out;
  for (std::size_t b = 0; b < problem.block_sizes.size(); ++b) {
    const int n = problem.block_sizes[b];
    const RMatrix& x = rs.x[b];
    CMatrix c(n, n);
    c.real() = 0.5 * (x.topLeftCorner(n, n) + x.bottomRightCorner(n, n));
    c.imag() = 0.5 * (x.bottomLeftCorner(n, n) - x.topRightCorner(n, n));
    out.x.push_back(hermitian_part(c));
  }
  out.primal_objective = rs.primal_objective;
  out.dual_objective = rs.dual_objective;
  out.primal_infeasibility = rs.primal_infeasibility;
  out.dual_infeasibility = rs.dual_infeasibility;
  out.iterations = rs.iterations;
  out.status = rs.status;
  return out;
}

}  // namespace recoverlib::sdp
