#include "recoverlib/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace recoverlib::kernels {

namespace {

// Range [begin, end) of entries of constraint `c` that sit in `block`.
struct BlockSpan {
  int block;
  std::size_t begin;
  std::size_t end;
};

std::vector<BlockSpan> spans_of(const std::vector<sdp::SymEntry>& entries) {
  std::vector<BlockSpan> spans;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (spans.empty() || spans.back().block != entries[k].block)
      spans.push_back({entries[k].block, k, k + 1});
    else
      spans.back().end = k + 1;
  }
  return spans;
}

double dot_entries(const std::vector<sdp::SymEntry>& entries, std::size_t begin, std::size_t end,
                   const RMatrix& g) {
  double acc = 0.0;
  for (std::size_t k = begin; k < end; ++k) {
    const auto& e = entries[k];
    if (e.row == e.col)
      acc += e.value * g(e.row, e.row);
    else
      acc += e.value * (g(e.row, e.col) + g(e.col, e.row));
  }
  return acc;
}

// G = X A Sinv restricted to one block, for the entries [begin, end) of A.
void x_a_sinv(const std::vector<sdp::SymEntry>& entries, std::size_t begin, std::size_t end,
              const RMatrix& x, const RMatrix& s_inv, RMatrix& xa, RMatrix& g,
              std::vector<int>& cols) {
  const Eigen::Index n = x.rows();
  cols.clear();
  for (std::size_t k = begin; k < end; ++k) {
    cols.push_back(entries[k].col);
    cols.push_back(entries[k].row);
  }
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  for (int c : cols) xa.col(c).setZero();
  for (std::size_t k = begin; k < end; ++k) {
    const auto& e = entries[k];
    xa.col(e.col) += e.value * x.col(e.row);
    if (e.row != e.col) xa.col(e.row) += e.value * x.col(e.col);
  }
  if (cols.size() * 4 < static_cast<std::size_t>(n)) {
    g.setZero(n, n);
    for (int c : cols) g.noalias() += xa.col(c) * s_inv.row(c);
  } else {
    g.noalias() = xa(Eigen::all, cols) * s_inv(cols, Eigen::all);
  }
}

}  // namespace

int thread_count() {
  int n = 1;
#ifdef _OPENMP
  n = omp_get_max_threads();
#endif
  if (const char* env = std::getenv("RECOVERLIB_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return std::max(1, n);
}

RMatrix schur_complement(const sdp::RealSdp& problem, const std::vector<RMatrix>& x,
                         const std::vector<RMatrix>& s_inv, bool parallel) {
  const int m = problem.constraint_count();
  std::vector<std::vector<BlockSpan>> spans(m);
  for (int i = 0; i < m; ++i) spans[i] = spans_of(problem.constraints[i]);

  // Constraints touching each block, so column j only visits relevant rows.
  const int nb = static_cast<int>(problem.block_sizes.size());
  std::vector<std::vector<std::pair<int, std::size_t>>> touching(nb);
  std::vector<double> nnz(nb, 0.0);
  for (int i = 0; i < m; ++i)
    for (std::size_t s = 0; s < spans[i].size(); ++s) {
      const auto& sp = spans[i][s];
      touching[sp.block].push_back({i, s});
      nnz[sp.block] += static_cast<double>(sp.end - sp.begin);
    }

  // Blocks whose constraint matrices are mostly dense go through GEMM.
  std::vector<bool> dense(nb, false);
  for (int b = 0; b < nb; ++b) {
    const double n = problem.block_sizes[b];
    if (touching[b].size() >= 8 && nnz[b] / touching[b].size() >= n * n / 16.0) dense[b] = true;
  }

  RMatrix out = RMatrix::Zero(m, m);
  const int threads = parallel ? thread_count() : 1;
  (void)threads;

  for (int b = 0; b < nb; ++b) {
    if (!dense[b]) continue;
    const int n = problem.block_sizes[b];
    const int t = static_cast<int>(touching[b].size());
    RMatrix a(n * n, t), g(n * n, t);
    a.setZero();
#pragma omp parallel num_threads(threads) if (parallel && threads > 1)
    {
      RMatrix ak(n, n);
#pragma omp for schedule(static)
      for (int k = 0; k < t; ++k) {
        const auto [i, s] = touching[b][k];
        const auto& sp = spans[i][s];
        ak.setZero();
        for (std::size_t e = sp.begin; e < sp.end; ++e) {
          const auto& en = problem.constraints[i][e];
          ak(en.row, en.col) += en.value;
          if (en.row != en.col) ak(en.col, en.row) += en.value;
        }
        a.col(k) = Eigen::Map<const RVector>(ak.data(), n * n);
        // Tr(A_i X A_j Sinv) = vec(A_i) . vec(Sinv A_j X) for symmetric A_i.
        RMatrix gk = s_inv[b] * ak * x[b];
        g.col(k) = Eigen::Map<const RVector>(gk.data(), n * n);
      }
    }
    RMatrix mb(t, t);
#pragma omp parallel for num_threads(threads) if (parallel && threads > 1) schedule(dynamic, 1)
    for (int c0 = 0; c0 < t; c0 += 32) {
      const int w = std::min(32, t - c0);
      mb.middleCols(c0, w).noalias() = a.transpose() * g.middleCols(c0, w);
    }
    for (int kj = 0; kj < t; ++kj)
      for (int ki = 0; ki < t; ++ki) {
        const int i = touching[b][ki].first, j = touching[b][kj].first;
        if (i <= j) out(i, j) += mb(ki, kj);
      }
  }

#pragma omp parallel num_threads(threads) if (parallel && threads > 1)
  {
    std::vector<RMatrix> xa(nb), g(nb);
    for (int b = 0; b < nb; ++b) {
      if (dense[b]) continue;
      xa[b] = RMatrix::Zero(problem.block_sizes[b], problem.block_sizes[b]);
      g[b] = RMatrix::Zero(problem.block_sizes[b], problem.block_sizes[b]);
    }
    std::vector<int> cols;
#pragma omp for schedule(dynamic, 4)
    for (int j = 0; j < m; ++j) {
      const auto& aj = problem.constraints[j];
      for (const auto& span : spans[j]) {
        const int b = span.block;
        if (dense[b]) continue;
        x_a_sinv(aj, span.begin, span.end, x[b], s_inv[b], xa[b], g[b], cols);
        for (const auto& [i, s] : touching[b]) {
          if (i > j) break;
          const auto& si = spans[i][s];
          out(i, j) += dot_entries(problem.constraints[i], si.begin, si.end, g[b]);
        }
      }
    }
  }
  out.triangularView<Eigen::StrictlyLower>() = out.transpose().triangularView<Eigen::StrictlyLower>();
  return out;
}

RMatrix schur_complement_reference(const sdp::RealSdp& problem, const std::vector<RMatrix>& x,
                                   const std::vector<RMatrix>& s_inv) {
  const int m = problem.constraint_count();
  const int nb = static_cast<int>(problem.block_sizes.size());
  // Dense copies of every A_i.
  std::vector<std::vector<RMatrix>> dense(m);
  for (int i = 0; i < m; ++i) {
    dense[i].resize(nb);
    for (int b = 0; b < nb; ++b)
      dense[i][b] = RMatrix::Zero(problem.block_sizes[b], problem.block_sizes[b]);
    for (const auto& e : problem.constraints[i]) {
      dense[i][e.block](e.row, e.col) += e.value;
      if (e.row != e.col) dense[i][e.block](e.col, e.row) += e.value;
    }
  }
  RMatrix out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double acc = 0.0;
      for (int b = 0; b < nb; ++b)
        acc += (dense[i][b] * x[b] * dense[j][b] * s_inv[b]).trace();
      out(i, j) = acc;
    }
  return out;
}

RVector apply_constraints(const sdp::RealSdp& problem, const std::vector<RMatrix>& g,
                          bool parallel) {
  const int m = problem.constraint_count();
  RVector out(m);
  const int threads = parallel ? thread_count() : 1;
  (void)threads;
#pragma omp parallel for num_threads(threads) if (parallel && threads > 1) schedule(static)
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (const auto& e : problem.constraints[i]) {
      const RMatrix& gb = g[e.block];
      if (e.row == e.col)
        acc += e.value * gb(e.row, e.row);
      else
        acc += e.value * (gb(e.row, e.col) + gb(e.col, e.row));
    }
    out(i) = acc;
  }
  return out;
}

std::vector<RMatrix> adjoint_constraints(const sdp::RealSdp& problem, const RVector& y) {
  std::vector<RMatrix> out;
  for (int n : problem.block_sizes) out.push_back(RMatrix::Zero(n, n));
  for (int i = 0; i < problem.constraint_count(); ++i) {
    const double yi = y(i);
    if (yi == 0.0) continue;
    for (const auto& e : problem.constraints[i]) {
      out[e.block](e.row, e.col) += yi * e.value;
      if (e.row != e.col) out[e.block](e.col, e.row) += yi * e.value;
    }
  }
  return out;
}

}  // namespace recoverlib::kernels
