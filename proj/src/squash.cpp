#include "recoverlib/squash.hpp"

#include "recoverlib/infoquant.hpp"

#include <algorithm>
#include <cmath>

namespace recoverlib {

namespace {

Labels concat(const Labels& a, const Labels& b) {
  Labels out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

CMatrix ordered(const MultipartiteState& s, const Labels& order) {
  return permute_systems(partial_trace(s, order), order).matrix();
}

// (A, B, E) -> (B, A, E)
CMatrix abe_to_bae(const CMatrix& m, int da, int db, int de) {
  return permute_matrix(m, Dims{da, db, de}, std::vector<int>{1, 0, 2});
}

RecoveryProblem extension_problem(const CMatrix& omega_abe, int da, int db, int de) {
  RecoveryProblem p;
  p.da = da;
  p.db = db;
  p.dc = de;
  p.target = abe_to_bae(omega_abe, da, db, de);
  p.rho_bc = trace_leading(omega_abe, da);
  return p;
}

}  // namespace

Purified canonical_purification(const CMatrix& rho_ab) {
  HermitianEig e = hermitian_eig(rho_ab);
  const double cut = 1e-12 * std::max(e.values.maxCoeff(), 0.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = e.values.size() - 1; k >= 0; --k)
    if (e.values(k) > cut) keep.push_back(k);
  Purified p;
  const auto n = rho_ab.rows();
  const int r = static_cast<int>(keep.size());
  p.basis.resize(n, r);
  p.weights.resize(r);
  p.psi = CVector::Zero(n * r);
  for (int k = 0; k < r; ++k) {
    p.basis.col(k) = e.vectors.col(keep[k]);
    p.weights(k) = e.values(keep[k]);
    for (Eigen::Index i = 0; i < n; ++i)
      p.psi(i * r + k) = std::sqrt(p.weights(k)) * p.basis(i, k);
  }
  return p;
}

CMatrix extension_from_squashing(const Purified& p, const CMatrix& squashing_choi, int env_dim) {
  CMatrix pure = p.psi * p.psi.adjoint();
  return apply_choi(squashing_choi, p.rank(), env_dim, pure);
}

QuantumChannel squashing_from_extension(const CMatrix& rho_ab, const CMatrix& omega_abe, int da,
                                        int db, int de) {
  const int dab = da * db;
  if (omega_abe.rows() != dab * de) throw InputError("extension has the wrong dimension");
  if ((trace_trailing(omega_abe, de) - rho_ab).cwiseAbs().maxCoeff() > 1e-8)
    throw InputError("extension does not reduce to the given state");
  Purified pur = canonical_purification(rho_ab);
  const int r = pur.rank();

  // |omega> = sum_j sqrt(mu_j) |u_j>_ABE |j>_F
  HermitianEig e = hermitian_eig(omega_abe);
  const double cut = 1e-12 * std::max(e.values.maxCoeff(), 0.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = e.values.size() - 1; k >= 0; --k)
    if (e.values(k) > cut) keep.push_back(k);
  const int f = static_cast<int>(keep.size());

  // W |k> = lambda_k^{-1/2} (<k|_AB (x) I) |omega>, an isometry E' -> E F.
  CMatrix w = CMatrix::Zero(de * f, r);
  for (int k = 0; k < r; ++k) {
    const double inv = 1.0 / std::sqrt(pur.weights(k));
    for (int j = 0; j < f; ++j) {
      const double mu = std::sqrt(e.values(keep[j]));
      for (int ed = 0; ed < de; ++ed) {
        cplx acc = 0.0;
        for (int ab = 0; ab < dab; ++ab)
          acc += std::conj(pur.basis(ab, k)) * e.vectors(ab * de + ed, keep[j]);
        w(ed * f + j, k) = inv * mu * acc;
      }
    }
  }
  std::vector<CMatrix> kraus;
  for (int j = 0; j < f; ++j) {
    CMatrix kj(de, r);
    for (int ed = 0; ed < de; ++ed) kj.row(ed) = w.row(ed * f + j);
    kraus.push_back(kj);
  }
  CMatrix choi = polish_choi(choi_from_kraus(kraus), r, de);
  return QuantumChannel(Dims{r}, Dims{de}, choi);
}

OptResult extension_for(const CMatrix& omega_abe, int da, int db, int de,
                        const sdp::SdpOptions& opts) {
  RecoveryProblem p = extension_problem(omega_abe, da, db, de);
  FidelityOutcome o = solve_recovery_convex(p, opts);
  require_converged(o, "extension fidelity of recovery");
  OptResult r;
  CMatrix j = polish_choi(o.variables[0], de, da * de);
  r.value = std::min(1.0, o.fidelity());
  r.certificate_value = recovery_fidelity(p, j);
  r.certificate.emplace_back(Dims{de}, Dims{da, de}, j);
  r.iterations = o.iterations;
  r.gap = o.gap();
  r.primal_infeasibility = o.primal_infeasibility;
  r.dual_infeasibility = o.dual_infeasibility;
  r.bound = BoundKind::exact;
  r.backend = Backend::convex;
  return r;
}

namespace {

struct RunOutcome {
  double f = -1.0;
  CMatrix squashing;
  CMatrix recovery;
  int env_dim = 0;
  int iterations = 0;
  bool converged = true;
};

// Alternation from one starting squashing channel.
RunOutcome alternate(const Purified& pur, int da, int db, int de, CMatrix s,
                     const GseOptions& opts) {
  const int r = pur.rank();
  RunOutcome best;
  best.env_dim = de;
  CMatrix pure = pur.psi * pur.psi.adjoint();
  double previous = -1.0;

  for (int sweep = 0; sweep < std::max(1, opts.sweeps); ++sweep) {
    CMatrix omega = extension_from_squashing(pur, s, de);
    RecoveryProblem prob = extension_problem(omega, da, db, de);
    FidelityOutcome rec = solve_recovery_convex(prob, opts.sdp);
    best.iterations += rec.iterations;
    try {
      require_converged(rec, "recovery step");
    } catch (const SolverError&) {
      best.converged = false;
      break;
    }
    CMatrix rj = polish_choi(rec.variables[0], de, da * de);
    double f1 = std::min(1.0, rec.fidelity());
    if (f1 > best.f) {
      best.f = f1;
      best.squashing = s;
      best.recovery = rj;
    }
    if (previous >= 0.0 && f1 - previous < opts.tol * std::max(f1, 1e-300)) break;
    previous = f1;
    if (sweep + 1 == std::max(1, opts.sweeps)) break;

    // Squashing step: both sides are affine in the squashing Choi matrix.
    FidelityProgram prog;
    int v = prog.add_variable(r * de, CMatrix::Identity(r * de, r * de) / de);
    prog.require_partial_trace_identity(v, r, de);
    AffineOperator p_side, q_side;
    p_side.terms.emplace_back(v, [&](const CMatrix& x) {
      return abe_to_bae(apply_choi(x, r, de, pure), da, db, de);
    });
    q_side.terms.emplace_back(v, [&](const CMatrix& x) {
      CMatrix om = apply_choi(x, r, de, pure);
      return apply_choi(rj, de, da * de, trace_leading(om, da));
    });
    FidelityOutcome sq = prog.maximize(p_side, q_side, opts.sdp);
    best.iterations += sq.iterations;
    try {
      require_converged(sq, "squashing step");
    } catch (const SolverError&) {
      best.converged = false;
      break;
    }
    s = polish_choi(sq.variables[0], r, de);
  }
  return best;
}

CMatrix embedding_choi(int r, int de) {
  CMatrix v = CMatrix::Zero(de, r);
  for (int k = 0; k < r; ++k) v(k, k) = 1.0;
  return choi_from_kraus({v});
}

}  // namespace

GseResult gse_heuristic(const MultipartiteState& rho, const Labels& a, const Labels& b,
                        const GseOptions& opts) {
  if (a.empty() || b.empty()) throw InputError("gse needs two nonempty groups");
  const int da = rho.dim_of(a), db = rho.dim_of(b);
  CMatrix rho_ab = ordered(rho, concat(a, b));
  Purified pur = canonical_purification(rho_ab);
  const int r = pur.rank();
  const int de = opts.env_dim > 0 ? opts.env_dim : da * db;
  if (opts.env_dim < 0) throw InputError("env_dim must be positive");

  Rng base(opts.seed, 0x7371756173ULL);
  GseResult out;
  out.f_sq_value = -1.0;
  out.bound = BoundKind::upper;
  const int restarts = std::max(1, opts.restarts);
  for (int k = 0; k < restarts; ++k) {
    CMatrix start;
    int env = de;
    if (k == 0 && opts.warm_start) {
      if (opts.warm_start->in_dim() != r)
        throw InputError("warm start squashing channel must act on the purifying system");
      start = opts.warm_start->choi();
      env = opts.warm_start->out_dim();
    } else if (k == 0 && de >= r) {
      start = embedding_choi(r, de);
    } else {
      Rng rng = base.split(static_cast<std::uint64_t>(k));
      start = random_channel(Dims{r}, Dims{de}, r, rng).choi();
    }
    RunOutcome run = alternate(pur, da, db, env, start, opts);
    out.iterations += run.iterations;
    out.converged = out.converged && run.converged;
    if (run.f > out.f_sq_value) {
      out.f_sq_value = run.f;
      out.env_dim = env;
      out.squashing.emplace(Dims{r}, Dims{env}, run.squashing);
      out.recovery.emplace(Dims{env}, Dims{da, env}, run.recovery);
    }
  }
  out.restarts = restarts;
  if (out.f_sq_value <= 0.0) throw SolverError("gse: no restart produced a value", 0, 0, 0, 0);
  out.e_value = -0.5 * std::log2(out.f_sq_value);
  return out;
}

GseResult gse_pure(const MultipartiteState& phi, const Labels& a, const Labels& b) {
  if (phi.purity() < 1.0 - 1e-9) throw InputError("gse_pure: input state is not pure");
  const int da = phi.dim_of(a);
  CMatrix rho_a = ordered(phi, a);
  (void)b;
  HermitianEig e = hermitian_eig(rho_a);
  const Eigen::Index top = e.values.size() - 1;
  const double lmax = e.values(top);
  GseResult out;
  out.bound = BoundKind::exact;
  out.f_sq_value = lmax * lmax;
  out.e_value = -std::log2(lmax);
  out.env_dim = 1;
  out.squashing.emplace(Dims{1}, Dims{1}, CMatrix::Ones(1, 1));
  CVector v = e.vectors.col(top);
  out.recovery.emplace(Dims{1}, Dims{da}, CMatrix(v * v.adjoint()));
  return out;
}

MultipartiteState separable_state(const std::vector<SeparableTerm>& terms) {
  if (terms.empty()) throw InputError("empty separable decomposition");
  const int da = static_cast<int>(terms.front().a.size());
  const int db = static_cast<int>(terms.front().b.size());
  CMatrix rho = CMatrix::Zero(da * db, da * db);
  for (const auto& t : terms) {
    CVector v = CVector(kron(t.a, t.b));
    rho += t.weight * v * v.adjoint();
  }
  return MultipartiteState(Dims{da, db}, Labels{"A", "B"}, rho);
}

WitnessExtension separable_witness_extension(const std::vector<SeparableTerm>& terms) {
  if (terms.empty()) throw InputError("empty separable decomposition");
  const int n = static_cast<int>(terms.size());
  const int da = static_cast<int>(terms.front().a.size());
  const int db = static_cast<int>(terms.front().b.size());
  double total = 0.0;
  for (const auto& t : terms) {
    if (t.weight < 0.0) throw InputError("negative weight in decomposition");
    if (t.a.size() != da || t.b.size() != db) throw InputError("inconsistent term dimensions");
    if (std::abs(t.a.norm() - 1.0) > 1e-9 || std::abs(t.b.norm() - 1.0) > 1e-9)
      throw InputError("decomposition vectors must be normalized");
    total += t.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("weights must sum to one");

  CMatrix omega = CMatrix::Zero(da * db * n, da * db * n);
  std::vector<CMatrix> kraus;
  for (int x = 0; x < n; ++x) {
    const auto& t = terms[x];
    CVector flag = CVector::Zero(n);
    flag(x) = 1.0;
    CVector v = CVector(kron(kron(t.a, t.b), flag));
    omega += t.weight * v * v.adjoint();
    // |psi_x>_A |x>_E <x|_E
    kraus.push_back(CMatrix(kron(t.a, flag) * flag.adjoint()));
  }
  MultipartiteState ext(Dims{da, db, n}, Labels{"A", "B", "E"}, omega);
  QuantumChannel rec = kraus_to_choi(kraus, Dims{n}, Dims{da, n});
  RecoveryProblem p = recovery_problem(ext, {"A"}, {"B"}, {"E"});
  double f = recovery_fidelity(p, rec.choi());
  return {ext, rec, f};
}

int private_purification_rank(const MultipartiteState& gamma) {
  return canonical_purification(ordered(gamma, Labels{"A", "A'", "B", "B'"})).rank();
}

double private_state_fidelity_cap(const MultipartiteState& gamma, const QuantumChannel& squashing,
                                  const sdp::SdpOptions& opts) {
  CMatrix rho = ordered(gamma, Labels{"A", "A'", "B", "B'"});
  const int dx = gamma.dim_of(Labels{"A", "A'"});
  const int dy = gamma.dim_of(Labels{"B", "B'"});
  Purified pur = canonical_purification(rho);
  if (squashing.in_dim() != pur.rank())
    throw InputError("squashing channel input must match the purification rank");
  const int de = squashing.out_dim();
  CMatrix omega = extension_from_squashing(pur, squashing.choi(), de);
  return extension_for(omega, dx, dy, de, opts).value;
}

}  // namespace recoverlib
