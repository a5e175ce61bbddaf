#include "recoverlib/recopt.hpp"

#include "recoverlib/infoquant.hpp"

#include <algorithm>
#include <cmath>

namespace recoverlib {

std::string to_string(Backend b) {
  switch (b) {
    case Backend::petz: return "petz";
    case Backend::seesaw: return "seesaw";
    case Backend::convex: return "convex";
  }
  return "unknown";
}

std::string to_string(BoundKind b) {
  switch (b) {
    case BoundKind::exact: return "exact-within-tol";
    case BoundKind::lower: return "lower-bound";
    case BoundKind::upper: return "upper-bound";
  }
  return "unknown";
}

Backend parse_backend(const std::string& s) {
  if (s == "petz") return Backend::petz;
  if (s == "seesaw") return Backend::seesaw;
  if (s == "convex") return Backend::convex;
  throw InputError("unknown backend '" + s + "'");
}

namespace {

Labels concat(const Labels& a, const Labels& b) {
  Labels out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Reduced matrix of `s` on `order` (in that order); 1x1 for an empty group.
CMatrix ordered(const MultipartiteState& s, const Labels& order) {
  if (order.empty()) return CMatrix::Ones(1, 1);
  return permute_systems(partial_trace(s, order), order).matrix();
}

int group_dim(const MultipartiteState& s, const Labels& g) {
  return g.empty() ? 1 : s.dim_of(g);
}

// Per-system dimensions of a group, {1} when it is empty.
Dims group_dims(const MultipartiteState& s, const Labels& g) {
  if (g.empty()) return {1};
  Dims d;
  for (const auto& l : g) d.push_back(s.dim_of(l));
  return d;
}

void check_groups(const MultipartiteState& s, const Labels& a, const Labels& b,
                  const Labels& c) {
  if (a.empty()) throw InputError("the recovered group A must be nonempty");
  Labels all = concat(concat(a, b), c);
  Labels sorted = all;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InputError("label groups overlap");
  for (const auto& l : all)
    if (!s.has(l)) throw InputError("unknown label '" + l + "'");
}

// Purification of rho as a flat vector over (rho index, r).
struct Purification {
  CVector psi;
  int dr = 0;
};

Purification purify_matrix(const CMatrix& rho) {
  HermitianEig e = hermitian_eig(rho);
  const double cut = 1e-12 * std::max(e.values.maxCoeff(), 0.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = e.values.size() - 1; k >= 0; --k)
    if (e.values(k) > cut) keep.push_back(k);
  Purification p;
  p.dr = static_cast<int>(keep.size());
  const auto n = rho.rows();
  p.psi = CVector::Zero(n * p.dr);
  for (int r = 0; r < p.dr; ++r) {
    double w = std::sqrt(e.values(keep[r]));
    for (Eigen::Index i = 0; i < n; ++i) p.psi(i * p.dr + r) = w * e.vectors(i, keep[r]);
  }
  return p;
}

// Uhlmann see-saw over Stinespring isometries of the recovery map and the
// isometry on the purifying system. Works on rho in (A, B, C) ordering.
struct SeesawResult {
  CMatrix choi;
  double fidelity = 0.0;
  int iterations = 0;
  bool converged = false;
};

SeesawResult uhlmann_seesaw(const CMatrix& rho_abc, int da, int db, int dc,
                            const CMatrix& start_choi, double tol, int max_iter) {
  Purification pur = purify_matrix(rho_abc);
  const int dr = pur.dr;
  const int de = da * dc * dc;
  const int dout = da * dc;  // (a', c')
  const int big_o = dout * de;
  auto psi = [&](int a, int b, int c, int r) -> cplx {
    return pur.psi(((a * db + b) * dc + c) * dr + r);
  };

  // Stinespring of the starting channel, padded to de environment levels.
  CMatrix v = CMatrix::Zero(big_o, dc);
  {
    QuantumChannel ch(Dims{dc}, Dims{dout}, start_choi);
    Isometry st = stinespring(ch);
    const int ne = static_cast<int>(st.matrix().rows()) / dout;
    for (int o = 0; o < dout; ++o)
      for (int k = 0; k < std::min(ne, de); ++k) v.row(o * de + k) = st.matrix().row(o * ne + k);
  }

  // psi as a matrix Psi_c[c, (a,b,r)].
  CMatrix psi_c(dc, da * db * dr);
  for (int a = 0; a < da; ++a)
    for (int b = 0; b < db; ++b)
      for (int c = 0; c < dc; ++c)
        for (int r = 0; r < dr; ++r) psi_c(c, (a * db + b) * dr + r) = psi(a, b, c, r);

  const int wrows = da * dr * de;
  CMatrix w(wrows, dr);

  // W-step for fixed V; returns sqrt F for V.
  auto w_step = [&]() {
    CMatrix t = v * psi_c;  // [(a_s,c_s,e), (a_p,b,r_p)]
    CMatrix l = CMatrix::Zero(wrows, dr);
    for (int as = 0; as < da; ++as)
      for (int cs = 0; cs < dc; ++cs)
        for (int e = 0; e < de; ++e) {
          const int o = (as * dc + cs) * de + e;
          for (int ap = 0; ap < da; ++ap)
            for (int rp = 0; rp < dr; ++rp) {
              const int row = (ap * dr + rp) * de + e;
              for (int b = 0; b < db; ++b) {
                cplx tv = t(o, (ap * db + b) * dr + rp);
                if (tv == cplx(0.0)) continue;
                for (int r = 0; r < dr; ++r) l(row, r) += std::conj(psi(as, b, cs, r)) * tv;
              }
            }
        }
    w = polar_isometry(l);
    return trace_norm(l);
  };

  // V-step for fixed W.
  auto v_step = [&]() {
    // wpsi[(a_s,b,c_s), (a_p,r_p,e)] = sum_r W[(a_p,r_p,e), r] psi[a_s,b,c_s,r]
    CMatrix psi_r(da * db * dc, dr);
    for (int i = 0; i < da * db * dc; ++i)
      for (int r = 0; r < dr; ++r) psi_r(i, r) = pur.psi(i * dr + r);
    CMatrix wpsi = psi_r * w.transpose();
    CMatrix k = CMatrix::Zero(dc, big_o);
    for (int c = 0; c < dc; ++c)
      for (int as = 0; as < da; ++as)
        for (int cs = 0; cs < dc; ++cs)
          for (int e = 0; e < de; ++e) {
            const int o = (as * dc + cs) * de + e;
            cplx acc = 0.0;
            for (int ap = 0; ap < da; ++ap)
              for (int b = 0; b < db; ++b)
                for (int rp = 0; rp < dr; ++rp)
                  acc += psi(ap, b, c, rp) *
                         std::conj(wpsi((as * db + b) * dc + cs, (ap * dr + rp) * de + e));
            k(c, o) = acc;
          }
    v = polar_isometry(k.adjoint());
  };

  SeesawResult out;
  double root = w_step();
  double f = root * root;
  int it = 0;
  for (; it < max_iter; ++it) {
    v_step();
    double r2 = w_step();
    double f2 = r2 * r2;
    double improvement = f2 - f;
    f = std::max(f, f2);
    if (improvement < tol * std::max(f, 1e-300)) {
      out.converged = true;
      ++it;
      break;
    }
  }
  out.iterations = it;
  out.fidelity = f;

  std::vector<CMatrix> kraus;
  for (int e = 0; e < de; ++e) {
    CMatrix ke(dout, dc);
    for (int o = 0; o < dout; ++o) ke.row(o) = v.row(o * de + e);
    if (ke.cwiseAbs().maxCoeff() > 0.0) kraus.push_back(ke);
  }
  out.choi = polish_choi(choi_from_kraus(kraus), dc, dout);
  return out;
}

// Permutation (B, A, C) -> (A, B, C) of a matrix.
CMatrix bac_to_abc(const CMatrix& m, int db, int da, int dc) {
  return permute_matrix(m, Dims{db, da, dc}, std::vector<int>{1, 0, 2});
}

CMatrix petz_choi(const MultipartiteState& s, const Labels& a, const Labels& c) {
  if (c.empty()) {
    // Nothing to condition on: prepare rho_A.
    return ordered(s, a);
  }
  MultipartiteState rho_ac = permute_systems(partial_trace(s, concat(a, c)), concat(a, c));
  return petz_recovery(rho_ac, a, c).choi();
}

}  // namespace

RecoveryProblem recovery_problem(const MultipartiteState& s, const Labels& a, const Labels& b,
                                 const Labels& c) {
  check_groups(s, a, b, c);
  RecoveryProblem p;
  p.da = group_dim(s, a);
  p.db = group_dim(s, b);
  p.dc = group_dim(s, c);
  p.target = ordered(s, concat(concat(b, a), c));
  p.rho_bc = ordered(s, concat(b, c));
  return p;
}

CMatrix recovered_state(const RecoveryProblem& p, const CMatrix& choi) {
  return apply_choi(choi, p.dc, p.da * p.dc, p.rho_bc);
}

double recovery_fidelity(const RecoveryProblem& p, const CMatrix& choi) {
  return std::min(1.0, fidelity(p.target, recovered_state(p, choi)));
}

CMatrix polish_choi(const CMatrix& choi, int in_dim, int out_dim) {
  CMatrix j = spectral_apply(hermitian_part(choi), [](double x) { return std::max(x, 0.0); });
  CMatrix m = choi_input_marginal(j, in_dim, out_dim);
  CMatrix corr = psd_power(m, -0.5, 1e-14);
  CMatrix fix = kron(corr, CMatrix::Identity(out_dim, out_dim));
  return hermitian_part(fix * j * fix);
}

FidelityOutcome solve_recovery_convex(const RecoveryProblem& p, const sdp::SdpOptions& opts) {
  const int din = p.dc, dout = p.da * p.dc;
  FidelityProgram prog;
  int j = prog.add_variable(din * dout, CMatrix::Identity(din * dout, din * dout) / dout);
  prog.require_partial_trace_identity(j, din, dout);
  AffineOperator q;
  q.terms.emplace_back(j, [&p, din, dout](const CMatrix& x) {
    return apply_choi(x, din, dout, p.rho_bc);
  });
  return prog.maximize(AffineOperator::fixed(p.target), q, opts);
}

void require_converged(const FidelityOutcome& o, const char* what) {
  if (o.converged()) return;
  if (o.gap() <= 1e-7 && o.primal_infeasibility <= 1e-7 && o.dual_infeasibility <= 1e-7) return;
  throw SolverError(std::string(what) + ": interior-point solver stopped (" +
                        sdp::to_string(o.status) + ")",
                    o.gap(), o.primal_infeasibility, o.dual_infeasibility, o.iterations);
}

OptResult fidelity_of_recovery(const MultipartiteState& s, const Labels& a, const Labels& b,
                               const Labels& c, const RecoveryOptions& opts) {
  RecoveryProblem p = recovery_problem(s, a, b, c);
  const Dims in = group_dims(s, c);
  Dims out = group_dims(s, a);
  if (!c.empty()) {
    Dims dc = group_dims(s, c);
    out.insert(out.end(), dc.begin(), dc.end());
  }
  OptResult r;
  r.backend = opts.backend;

  switch (opts.backend) {
    case Backend::petz: {
      CMatrix j = petz_choi(s, a, c);
      r.value = recovery_fidelity(p, j);
      r.certificate_value = r.value;
      r.bound = BoundKind::lower;
      r.certificate.emplace_back(in, out, j);
      break;
    }
    case Backend::seesaw: {
      CMatrix j0 = petz_choi(s, a, c);
      SeesawResult ss = uhlmann_seesaw(bac_to_abc(p.target, p.db, p.da, p.dc), p.da, p.db, p.dc,
                                       j0, opts.tol, opts.max_iterations);
      r.certificate_value = recovery_fidelity(p, ss.choi);
      // The Petz start is always available.
      double petz = recovery_fidelity(p, j0);
      CMatrix best = r.certificate_value >= petz ? ss.choi : j0;
      r.value = std::max(r.certificate_value, petz);
      r.certificate_value = r.value;
      r.certificate.emplace_back(in, out, best);
      r.iterations = ss.iterations;
      r.converged = ss.converged;
      r.bound = BoundKind::lower;
      break;
    }
    case Backend::convex: {
      FidelityOutcome o = solve_recovery_convex(p, opts.sdp);
      require_converged(o, "fidelity of recovery");
      CMatrix j = polish_choi(o.variables[0], p.dc, p.da * p.dc);
      r.value = std::min(1.0, o.fidelity());
      r.certificate_value = recovery_fidelity(p, j);
      r.certificate.emplace_back(in, out, j);
      r.iterations = o.iterations;
      r.gap = o.gap();
      r.primal_infeasibility = o.primal_infeasibility;
      r.dual_infeasibility = o.dual_infeasibility;
      r.bound = BoundKind::exact;
      break;
    }
  }
  return r;
}

OptResult surprisal_of_recovery(const MultipartiteState& s, const Labels& a, const Labels& b,
                                const Labels& c, const RecoveryOptions& opts) {
  OptResult r = fidelity_of_recovery(s, a, b, c, opts);
  r.value = -std::log2(r.value);
  r.certificate_value = -std::log2(r.certificate_value);
  if (r.bound == BoundKind::lower) r.bound = BoundKind::upper;
  else if (r.bound == BoundKind::upper) r.bound = BoundKind::lower;
  return r;
}

OptResult fidelity_AB(const MultipartiteState& sigma, const Labels& a, const Labels& b,
                      const RecoveryOptions& opts) {
  return fidelity_of_recovery(sigma, a, b, {}, opts);
}

// -- multipartite --------------------------------------------------------------

namespace {

struct Chain {
  CMatrix target;  // on (A_l, A_{l-1}, ..., A_1, C)
  CMatrix start;   // rho on (A_l, C)
  std::vector<int> da;  // da[k] for k = 1..l-1 (index 0 unused)
  int dc = 1;
};

Chain make_chain(const MultipartiteState& s, const std::vector<Labels>& parts, const Labels& c) {
  const int l = static_cast<int>(parts.size());
  Chain ch;
  Labels order = parts.back();
  for (int k = l - 2; k >= 0; --k) order = concat(order, parts[k]);
  order = concat(order, c);
  Labels sorted = order;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InputError("label groups overlap");
  for (const auto& lab : order)
    if (!s.has(lab)) throw InputError("unknown label '" + lab + "'");
  ch.target = ordered(s, order);
  ch.start = ordered(s, concat(parts.back(), c));
  ch.dc = group_dim(s, c);
  ch.da.assign(l, 1);
  for (int k = 0; k < l - 1; ++k) ch.da[k + 1] = group_dim(s, parts[k]);
  return ch;
}

// R^from o ... o R^{l-1} applied to the start state; chois[k-1] is R^k.
CMatrix run_chain(const Chain& ch, const std::vector<CMatrix>& chois, int from, CMatrix tau) {
  const int l = static_cast<int>(ch.da.size());
  for (int k = l - 1; k >= from; --k)
    tau = apply_choi(chois[k - 1], ch.dc, ch.da[k] * ch.dc, tau);
  return tau;
}

CMatrix run_outer(const Chain& ch, const std::vector<CMatrix>& chois, int upto, CMatrix tau) {
  for (int k = upto; k >= 1; --k) tau = apply_choi(chois[k - 1], ch.dc, ch.da[k] * ch.dc, tau);
  return tau;
}

}  // namespace

double multipartite_fidelity(const MultipartiteState& s, const std::vector<Labels>& parts,
                             const Labels& c, const std::vector<CMatrix>& chois) {
  if (parts.size() < 2) throw InputError("multipartite recovery needs at least two parts");
  if (chois.size() + 1 != parts.size()) throw InputError("need one recovery map per lost part");
  Chain ch = make_chain(s, parts, c);
  return std::min(1.0, fidelity(ch.target, run_chain(ch, chois, 1, ch.start)));
}

OptResult multipartite_for(const MultipartiteState& s, const std::vector<Labels>& parts,
                           const Labels& c, const MultipartiteOptions& opts) {
  const int l = static_cast<int>(parts.size());
  if (l < 2) throw InputError("multipartite recovery needs at least two parts");
  if (l == 2) {
    RecoveryOptions ro;
    ro.sdp = opts.sdp;
    OptResult r = fidelity_of_recovery(s, parts[0], parts[1], c, ro);
    r.bound = BoundKind::lower;
    return r;
  }
  Chain ch = make_chain(s, parts, c);
  const int dc = ch.dc;

  OptResult best;
  best.value = -1.0;
  best.bound = BoundKind::lower;
  best.backend = Backend::convex;
  Rng base(opts.seed, 0x6d756c7469ULL);

  for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
    std::vector<CMatrix> chois;
    Rng rng = base.split(static_cast<std::uint64_t>(restart));
    for (int k = 1; k < l; ++k) {
      if (restart == 0) {
        chois.push_back(petz_choi(s, parts[k - 1], c));
      } else {
        const int dout = ch.da[k] * dc;
        chois.push_back(random_channel(Dims{dc}, Dims{dout}, dc * dout, rng).choi());
      }
    }
    double value = std::min(1.0, fidelity(ch.target, run_chain(ch, chois, 1, ch.start)));
    int iterations = 0;
    double worst_gap = 0.0, worst_p = 0.0, worst_d = 0.0;
    bool ok = true;

    for (int sweep = 0; sweep < opts.sweeps; ++sweep) {
      const double before = value;
      for (int k = 1; k < l; ++k) {
        CMatrix inner = run_chain(ch, chois, k + 1, ch.start);
        const int din = dc, dout = ch.da[k] * dc;
        FidelityProgram prog;
        int var = prog.add_variable(din * dout, CMatrix::Identity(din * dout, din * dout) / dout);
        prog.require_partial_trace_identity(var, din, dout);
        AffineOperator q;
        q.terms.emplace_back(var, [&, k, din, dout](const CMatrix& x) {
          return run_outer(ch, chois, k - 1, apply_choi(x, din, dout, inner));
        });
        FidelityOutcome o = prog.maximize(AffineOperator::fixed(ch.target), q, opts.sdp);
        iterations += o.iterations;
        try {
          require_converged(o, "multipartite recovery step");
        } catch (const SolverError&) {
          ok = false;
          continue;
        }
        worst_gap = std::max(worst_gap, o.gap());
        worst_p = std::max(worst_p, o.primal_infeasibility);
        worst_d = std::max(worst_d, o.dual_infeasibility);
        CMatrix candidate = polish_choi(o.variables[0], din, dout);
        std::vector<CMatrix> trial = chois;
        trial[k - 1] = candidate;
        double v = std::min(1.0, fidelity(ch.target, run_chain(ch, trial, 1, ch.start)));
        if (v >= value) {
          chois = std::move(trial);
          value = v;
        }
      }
      if (value - before < opts.tol * std::max(value, 1e-300)) break;
    }

    if (value > best.value) {
      best.value = value;
      best.certificate_value = value;
      best.certificate.clear();
      for (int k = 1; k < l; ++k) {
        Dims out = group_dims(s, parts[k - 1]), cd = group_dims(s, c);
        if (!c.empty()) out.insert(out.end(), cd.begin(), cd.end());
        best.certificate.emplace_back(cd, out, chois[k - 1]);
      }
      best.gap = worst_gap;
      best.primal_infeasibility = worst_p;
      best.dual_infeasibility = worst_d;
      best.converged = ok;
    }
    best.iterations += iterations;
  }
  return best;
}

}  // namespace recoverlib
