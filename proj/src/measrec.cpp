#include "recoverlib/measrec.hpp"

#include "recoverlib/infoquant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace recoverlib {

std::string to_string(DfmBackend b) {
  return b == DfmBackend::seesaw ? "seesaw" : "ppt-relax";
}

DfmBackend parse_dfm_backend(const std::string& s) {
  if (s == "seesaw") return DfmBackend::seesaw;
  if (s == "ppt-relax" || s == "ppt") return DfmBackend::ppt_relax;
  throw InputError("unknown D_F backend '" + s + "' (expected seesaw or ppt-relax)");
}

namespace {

struct Bipartite {
  CMatrix rho;  // on (A, B)
  int da = 1;
  int db = 1;
};

Bipartite bipartite(const MultipartiteState& s, const Labels& a, const Labels& b) {
  if (a.empty()) throw InputError("measured group A is empty");
  for (const auto& l : a)
    if (std::find(b.begin(), b.end(), l) != b.end())
      throw InputError("label '" + l + "' appears in both groups");
  Labels order = a;
  order.insert(order.end(), b.begin(), b.end());
  MultipartiteState t = permute_systems(partial_trace(s, order), order);
  return {t.matrix(), t.dim_of(a), b.empty() ? 1 : t.dim_of(b)};
}

// Tr_A{(M (x) I) rho}
CMatrix conditional_b(const Bipartite& p, const CMatrix& m) {
  return trace_leading(kron(m, CMatrix::Identity(p.db, p.db)) * p.rho, p.da);
}

// (E (x) id)(rho) for a channel A -> A given by its Choi matrix.
CMatrix apply_on_a(const Bipartite& p, const CMatrix& choi) {
  CMatrix rho_ba = permute_matrix(p.rho, {p.da, p.db}, {1, 0});
  CMatrix out = apply_choi(choi, p.da, p.da, rho_ba);
  return permute_matrix(out, {p.db, p.da}, {1, 0});
}

CMatrix measure_prepare(const Bipartite& p, const std::vector<CMatrix>& effects,
                        const std::vector<CMatrix>& preps) {
  CMatrix q = CMatrix::Zero(p.rho.rows(), p.rho.cols());
  for (std::size_t x = 0; x < effects.size(); ++x) q += kron(preps[x], conditional_b(p, effects[x]));
  return q;
}

CMatrix clamp_psd(const CMatrix& m) {
  return spectral_apply(hermitian_part(m), [](double v) { return std::max(v, 0.0); });
}

std::vector<CMatrix> polish_effects(std::vector<CMatrix> effects) {
  const auto d = effects.front().rows();
  CMatrix sum = CMatrix::Zero(d, d);
  for (auto& e : effects) {
    e = clamp_psd(e);
    sum += e;
  }
  CMatrix w = psd_power(sum, -0.5);
  for (auto& e : effects) e = hermitian_part(w * e * w);
  return effects;
}

CMatrix polish_state(const CMatrix& m) {
  CMatrix c = clamp_psd(m);
  double t = c.trace().real();
  if (t <= 1e-14) return CMatrix::Identity(m.rows(), m.cols()) / static_cast<double>(m.rows());
  return c / t;
}

struct EbPoint {
  std::vector<CMatrix> effects;
  std::vector<CMatrix> preps;
  double f = 0.0;
};

// Best preparations for fixed effects.
std::vector<CMatrix> optimal_preparations(const Bipartite& p, const std::vector<CMatrix>& effects,
                                          const std::vector<CMatrix>& current,
                                          const sdp::SdpOptions& opts) {
  FidelityProgram prog;
  AffineOperator q;
  std::vector<int> vars(effects.size(), -1);
  for (std::size_t x = 0; x < effects.size(); ++x) {
    CMatrix beta = conditional_b(p, effects[x]);
    if (beta.trace().real() < 1e-12) continue;
    vars[x] = prog.add_variable(p.da, CMatrix::Identity(p.da, p.da) / p.da);
    prog.require_unit_trace(vars[x]);
    q.terms.emplace_back(vars[x], [beta](const CMatrix& t) { return kron(t, beta); });
  }
  FidelityOutcome o = prog.maximize(AffineOperator::fixed(p.rho), q, opts);
  require_converged(o, "D_F preparation step");
  std::vector<CMatrix> preps = current;
  for (std::size_t x = 0; x < effects.size(); ++x)
    if (vars[x] >= 0) preps[x] = polish_state(o.variables[vars[x]]);
  return preps;
}

// Best effects for fixed preparations.
std::vector<CMatrix> optimal_effects(const Bipartite& p, const std::vector<CMatrix>& preps,
                                     const sdp::SdpOptions& opts) {
  FidelityProgram prog;
  AffineOperator q;
  std::vector<int> vars;
  const int n = static_cast<int>(preps.size());
  for (int x = 0; x < n; ++x) {
    int v = prog.add_variable(p.da, CMatrix::Identity(p.da, p.da) / n);
    vars.push_back(v);
    CMatrix tau = preps[x];
    q.terms.emplace_back(v, [&p, tau](const CMatrix& m) { return kron(tau, conditional_b(p, m)); });
  }
  prog.require_sum_identity(vars);
  FidelityOutcome o = prog.maximize(AffineOperator::fixed(p.rho), q, opts);
  require_converged(o, "D_F measurement step");
  std::vector<CMatrix> effects;
  for (int v : vars) effects.push_back(o.variables[v]);
  return polish_effects(std::move(effects));
}

double eb_value(const Bipartite& p, const EbPoint& e) {
  return fidelity(p.rho, measure_prepare(p, e.effects, e.preps));
}

CMatrix rank_one(const CVector& v) { return v * v.adjoint(); }

EbPoint basis_start(const Bipartite& p, const CMatrix& basis, Rng& rng) {
  const int n = p.da * p.da;
  EbPoint e;
  for (int x = 0; x < n; ++x) {
    if (x < p.da) {
      e.effects.push_back(rank_one(basis.col(x)));
      e.preps.push_back(rank_one(basis.col(x)));
    } else {
      e.effects.push_back(CMatrix::Zero(p.da, p.da));
      e.preps.push_back(random_pure({p.da}, {"A"}, rng).density().matrix());
    }
  }
  return e;
}

EbPoint random_start(const Bipartite& p, Rng& rng) {
  const int n = p.da * p.da;
  EbPoint e;
  e.effects = random_povm(p.da, n, rng).effects();
  for (int x = 0; x < n; ++x) e.preps.push_back(random_pure({p.da}, {"A"}, rng).density().matrix());
  return e;
}

DfmResult from_f(double f, BoundKind bound, DfmBackend backend) {
  DfmResult r;
  r.f_value = std::clamp(f, 0.0, 1.0);
  r.d_value = r.f_value > 0.0 ? -std::log2(r.f_value) : std::numeric_limits<double>::infinity();
  r.bound = bound;
  r.backend = backend;
  return r;
}

DfmResult dfm_seesaw(const Bipartite& p, const DfmOptions& opts) {
  Rng rng(opts.seed, 0x64664d);
  CMatrix eig_basis = hermitian_eig(trace_trailing(p.rho, p.db)).vectors;
  EbPoint best;
  best.f = -1.0;
  int total = 0;
  bool converged = true;
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    Rng sub = rng.split(r);
    EbPoint cur = r == 0   ? basis_start(p, CMatrix::Identity(p.da, p.da), sub)
                  : r == 1 ? basis_start(p, eig_basis, sub)
                           : random_start(p, sub);
    cur.f = eb_value(p, cur);
    bool settled = false;
    for (int it = 0; it < opts.max_sweeps; ++it) {
      ++total;
      EbPoint next = cur;
      next.preps = optimal_preparations(p, cur.effects, cur.preps, opts.sdp);
      next.effects = optimal_effects(p, next.preps, opts.sdp);
      next.f = eb_value(p, next);
      double gain = next.f - cur.f;
      if (gain > 0.0) cur = std::move(next);
      if (gain <= opts.tol * std::max(1.0, cur.f)) {
        settled = true;
        break;
      }
    }
    if (r == 0) converged = settled;
    if (cur.f > best.f) best = std::move(cur);
  }
  DfmResult out = from_f(best.f, BoundKind::upper, DfmBackend::seesaw);
  Povm povm(best.effects);
  out.channel_certificate = eb_channel(povm, best.preps);
  out.povm = povm;
  out.preparations = best.preps;
  out.iterations = total;
  out.restarts = std::max(1, opts.restarts);
  out.converged = converged;
  return out;
}

DfmResult dfm_ppt(const Bipartite& p, const DfmOptions& opts) {
  const int d = p.da;
  FidelityProgram prog;
  CMatrix mid = CMatrix::Identity(d * d, d * d) / d;
  int j = prog.add_variable(d * d, mid);
  int w = prog.add_variable(d * d, mid);
  prog.require_partial_trace_identity(j, d, d);
  prog.require_partial_transpose(w, j, d, d);
  AffineOperator q;
  q.terms.emplace_back(j, [&p](const CMatrix& x) { return apply_on_a(p, x); });
  FidelityOutcome o = prog.maximize(AffineOperator::fixed(p.rho), q, opts.sdp);
  require_converged(o, "D_F PPT relaxation");
  const bool exact = d == 2;
  DfmResult out = from_f(o.fidelity(), exact ? BoundKind::exact : BoundKind::lower,
                         DfmBackend::ppt_relax);
  out.iterations = o.iterations;
  out.gap = o.gap();
  if (exact) out.channel_certificate = QuantumChannel({d}, {d}, polish_choi(o.variables[0], d, d));
  return out;
}

double entropy_of_matrix(const CMatrix& m) { return von_neumann_entropy(m); }

// I(X;B) = S(B) - sum_x p_x S(B|x).
double classical_info(const Bipartite& p, const std::vector<CMatrix>& effects) {
  CMatrix rho_b = trace_leading(p.rho, p.da);
  double acc = entropy_of_matrix(rho_b);
  for (const auto& m : effects) {
    CMatrix beta = conditional_b(p, m);
    double px = beta.trace().real();
    if (px <= 1e-15) continue;
    acc -= px * entropy_of_matrix(beta / px);
  }
  return acc;
}

std::vector<CMatrix> bloch_projectors(double theta, double phi) {
  CVector v(2);
  v << std::cos(theta / 2), std::polar(std::sin(theta / 2), phi);
  CVector w(2);
  w << -std::conj(v(1)), std::conj(v(0));
  return {rank_one(v), rank_one(w)};
}

// Rank-one POVM from a frame: Lambda^x = S^{-1/2} w_x w_x^dagger S^{-1/2}.
std::vector<CMatrix> frame_povm(const CMatrix& frame) {
  CMatrix s_inv = psd_power(frame * frame.adjoint(), -0.5);
  std::vector<CMatrix> effects;
  for (Eigen::Index x = 0; x < frame.cols(); ++x) effects.push_back(rank_one(s_inv * frame.col(x)));
  return effects;
}

CMatrix random_frame(int d, int n, Rng& rng) {
  CMatrix f(d, n);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < n; ++c) f(r, c) = rng.complex_normal();
  return f;
}

}  // namespace

DfmResult dfm(const MultipartiteState& rho, const Labels& a, const Labels& b,
              const DfmOptions& opts) {
  Bipartite p = bipartite(rho, a, b);
  return opts.backend == DfmBackend::seesaw ? dfm_seesaw(p, opts) : dfm_ppt(p, opts);
}

DfmResult dfm_pure(const MultipartiteState& psi, const Labels& a, const Labels& b) {
  Bipartite p = bipartite(psi, a, b);
  if (std::abs(p.rho.trace().real() - (p.rho * p.rho).trace().real()) > 1e-8)
    throw InputError("dfm_pure: state is not pure");
  HermitianEig e = hermitian_eig(trace_trailing(p.rho, p.db));
  double purity = e.values.squaredNorm();
  std::vector<CMatrix> proj;
  for (int x = 0; x < p.da; ++x) proj.push_back(rank_one(e.vectors.col(x)));
  DfmResult out = from_f(purity, BoundKind::exact, DfmBackend::seesaw);
  Povm povm(proj);
  out.channel_certificate = eb_channel(povm, proj);
  out.povm = povm;
  out.preparations = proj;
  return out;
}

double eb_fidelity(const MultipartiteState& rho, const Labels& a, const Labels& b,
                   const QuantumChannel& eb) {
  Bipartite p = bipartite(rho, a, b);
  if (eb.in_dim() != p.da || eb.out_dim() != p.da)
    throw InputError("channel must map the A group to itself");
  return fidelity(p.rho, apply_on_a(p, eb.choi()));
}

double classical_information(const MultipartiteState& rho, const Labels& a, const Labels& b,
                             const Povm& povm) {
  Bipartite p = bipartite(rho, a, b);
  if (povm.dim() != p.da) throw InputError("POVM dimension does not match group A");
  return classical_info(p, povm.effects());
}

DiscordResult discord(const MultipartiteState& rho, const Labels& a, const Labels& b,
                      const DiscordOptions& opts) {
  Bipartite p = bipartite(rho, a, b);
  DiscordResult out;
  out.mutual_information = mutual_information(rho, a, b);
  std::vector<CMatrix> best_effects;
  double best = -1.0;

  if (p.da == 2) {
    double bt = 0.0, bp = 0.0;
    for (int i = 0; i < opts.theta_steps; ++i)
      for (int j = 0; j < opts.phi_steps; ++j) {
        double t = std::numbers::pi * (i + 0.5) / opts.theta_steps;
        double f = 2.0 * std::numbers::pi * j / opts.phi_steps;
        double v = classical_info(p, bloch_projectors(t, f));
        if (v > best) best = v, bt = t, bp = f;
      }
    // pattern search around the best grid point
    double h = std::numbers::pi / opts.theta_steps;
    while (h > 1e-9) {
      bool moved = false;
      for (auto [dt, dp] : {std::pair{h, 0.0}, {-h, 0.0}, {0.0, h}, {0.0, -h}}) {
        double v = classical_info(p, bloch_projectors(bt + dt, bp + dp));
        if (v > best) {
          best = v, bt += dt, bp += dp;
          moved = true;
        }
      }
      if (!moved) h *= 0.5;
    }
    best_effects = bloch_projectors(bt, bp);
  } else {
    const int n = p.da * p.da;
    Rng rng(opts.seed, 0x646973);
    CMatrix eig_basis = hermitian_eig(trace_trailing(p.rho, p.db)).vectors;
    for (int r = 0; r < std::max(1, opts.restarts); ++r) {
      Rng sub = rng.split(r);
      CMatrix frame = 1e-3 * random_frame(p.da, n, sub);
      if (r == 0) frame.leftCols(p.da) += CMatrix::Identity(p.da, p.da);
      else if (r == 1) frame.leftCols(p.da) += eig_basis;
      else frame = random_frame(p.da, n, sub);
      double cur = classical_info(p, frame_povm(frame));
      double step = 0.3;
      for (int s = 0; s < opts.search_steps && step > 1e-7; ++s) {
        CMatrix trial = frame + step * random_frame(p.da, n, sub);
        double v = classical_info(p, frame_povm(trial));
        if (v > cur) {
          frame = trial, cur = v;
          step *= 1.2;
        } else {
          step *= 0.85;
        }
      }
      if (cur > best) best = cur, best_effects = frame_povm(frame);
    }
  }
  out.classical_information = best;
  out.value = std::max(0.0, out.mutual_information - best);
  out.povm = Povm(best_effects);
  return out;
}

double discord_as_cqmi(const MultipartiteState& rho, const Labels& a, const Labels& b,
                       const Povm& povm) {
  Bipartite p = bipartite(rho, a, b);
  if (povm.dim() != p.da) throw InputError("POVM dimension does not match group A");
  Isometry v = measurement_isometry(povm);
  CMatrix u = kron(v.matrix(), CMatrix::Identity(p.db, p.db));
  const int nx = v.out_dims()[0], ne = v.out_dims()[1];
  MultipartiteState sigma({nx, ne, p.db}, {"X", "E", "B"}, u * p.rho * u.adjoint());
  return cqmi(sigma, {"E"}, {"B"}, {"X"});
}

FixedPointWitness approx_fixed_point_witness(const MultipartiteState& rho, const Labels& a,
                                             const Labels& b, double eps_budget,
                                             const DfmOptions& opts) {
  Bipartite p = bipartite(rho, a, b);
  DfmOptions o = opts;
  o.backend = DfmBackend::seesaw;
  DfmResult d = dfm_seesaw(p, o);
  const QuantumChannel& ch = *d.channel_certificate;
  FixedPointWitness w{ch};
  w.trace_distance = trace_norm(p.rho - apply_on_a(p, ch.choi()));
  w.d_value = d.d_value;
  w.bound = 2.0 * std::sqrt(std::max(0.0, d.d_value) * std::numbers::ln2);
  w.holds = w.trace_distance <= w.bound + 1e-5;
  w.within_budget = d.d_value <= eps_budget;
  return w;
}

DiscordBound discord_upper_from_fixed_point(const MultipartiteState& rho, const Labels& a,
                                            const Labels& b, const QuantumChannel& eb) {
  Bipartite p = bipartite(rho, a, b);
  if (eb.in_dim() != p.da || eb.out_dim() != p.da)
    throw InputError("channel must map the A group to itself");
  DiscordBound out;
  out.epsilon = trace_norm(p.rho - apply_on_a(p, eb.choi()));
  double eps = out.epsilon;
  if (eps > 1.0) {
    eps = 1.0;
    out.clamped = true;
  }
  out.bound = 4.0 * binary_entropy(eps) + 8.0 * eps * std::log2(static_cast<double>(p.da));
  return out;
}

}  // namespace recoverlib
