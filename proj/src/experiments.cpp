#include "recoverlib/experiments.hpp"

#include "recoverlib/infoquant.hpp"
#include "recoverlib/measrec.hpp"
#include "recoverlib/squash.hpp"
#include "recoverlib/stateio.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>

namespace recoverlib {

namespace {

using nlohmann::ordered_json;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ComputeRecord from_opt(const OptResult& r) {
  ComputeRecord rec;
  rec.value = r.value;
  rec.bound = to_string(r.bound);
  rec.backend = to_string(r.backend);
  rec.gap = r.gap;
  rec.primal_infeasibility = r.primal_infeasibility;
  rec.dual_infeasibility = r.dual_infeasibility;
  rec.iterations = r.iterations;
  rec.converged = r.converged;
  rec.extra.emplace_back("certificate_value", r.certificate_value);
  return rec;
}

ComputeRecord from_dfm(const DfmResult& r) {
  ComputeRecord rec;
  rec.value = r.d_value;
  rec.bound = to_string(r.bound);
  rec.backend = to_string(r.backend);
  rec.gap = r.gap;
  rec.iterations = r.iterations;
  rec.converged = r.converged;
  rec.extra.emplace_back("f_value", r.f_value);
  return rec;
}

ComputeRecord closed_form(double v) {
  ComputeRecord rec;
  rec.value = v;
  rec.bound = to_string(BoundKind::exact);
  rec.backend = "closed-form";
  return rec;
}

void need(const Labels& g, const char* name, const std::string& cmd) {
  if (g.empty()) throw InputError(cmd + ": group " + name + " must not be empty");
}

}  // namespace

std::string ComputeRecord::to_json() const {
  ordered_json j;
  j["command"] = command;
  j["value"] = value;
  j["bound"] = bound;
  j["backend"] = backend;
  j["gap"] = gap;
  j["primal_infeasibility"] = primal_infeasibility;
  j["dual_infeasibility"] = dual_infeasibility;
  j["iterations"] = iterations;
  j["converged"] = converged;
  for (const auto& [k, v] : extra) j[k] = v;
  if (!warnings.empty()) j["warnings"] = warnings;
  j["runtime_s"] = runtime_s;
  return j.dump();
}

ComputeRecord compute(const ComputeRequest& req, const MultipartiteState& s) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string& cmd = req.command;
  ComputeRecord rec;

  if (cmd == "for" || cmd == "ifr") {
    need(req.a, "A", cmd);
    need(req.b, "B", cmd);
    RecoveryOptions o;
    o.backend = req.backend.empty() ? Backend::convex : parse_backend(req.backend);
    o.tol = req.tol;
    rec = from_opt(cmd == "for" ? fidelity_of_recovery(s, req.a, req.b, req.c, o)
                                : surprisal_of_recovery(s, req.a, req.b, req.c, o));
  } else if (cmd == "cqmi") {
    need(req.a, "A", cmd);
    need(req.b, "B", cmd);
    rec = closed_form(cqmi(s, req.a, req.b, req.c));
  } else if (cmd == "renyi-cqmi") {
    need(req.a, "A", cmd);
    need(req.b, "B", cmd);
    RenyiCqmi r = renyi_cqmi(s, req.a, req.b, req.c, req.alpha);
    rec = closed_form(r.value);
    rec.extra.emplace_back("alpha", req.alpha);
    if (r.cutoff_engaged) rec.warnings.push_back("pseudo-inverse cutoff engaged");
  } else if (cmd == "gse") {
    need(req.a, "A", cmd);
    need(req.b, "B", cmd);
    GseOptions o;
    o.env_dim = req.env_dim;
    o.restarts = req.restarts;
    o.seed = req.seed;
    o.tol = req.tol;
    GseResult g = gse_heuristic(s, req.a, req.b, o);
    rec.value = g.e_value;
    rec.bound = to_string(g.bound);
    rec.backend = "alternating";
    rec.iterations = g.iterations;
    rec.converged = g.converged;
    rec.extra.emplace_back("f_sq", g.f_sq_value);
    rec.extra.emplace_back("env_dim", g.env_dim);
  } else if (cmd == "gse-pure") {
    need(req.a, "A", cmd);
    need(req.b, "B", cmd);
    GseResult g = gse_pure(s, req.a, req.b);
    rec = closed_form(g.e_value);
    rec.extra.emplace_back("f_sq", g.f_sq_value);
  } else if (cmd == "dfm") {
    need(req.a, "A", cmd);
    DfmOptions o;
    o.backend = req.backend.empty() ? DfmBackend::seesaw : parse_dfm_backend(req.backend);
    o.seed = req.seed;
    o.restarts = req.restarts;
    rec = from_dfm(dfm(s, req.a, req.b, o));
  } else if (cmd == "dfm-pure") {
    need(req.a, "A", cmd);
    rec = from_dfm(dfm_pure(s, req.a, req.b));
    rec.backend = "closed-form";
  } else if (cmd == "discord") {
    need(req.a, "A", cmd);
    DiscordOptions o;
    o.seed = req.seed;
    DiscordResult d = discord(s, req.a, req.b, o);
    rec.value = d.value;
    rec.bound = to_string(d.bound);
    rec.backend = "measurement-search";
    rec.extra.emplace_back("mutual_information", d.mutual_information);
    rec.extra.emplace_back("classical_information", d.classical_information);
  } else if (cmd == "mfor") {
    if (req.parts.size() < 2) throw InputError("mfor: needs at least two parts");
    MultipartiteOptions o;
    o.restarts = req.restarts;
    o.seed = req.seed;
    o.tol = req.tol;
    rec = from_opt(multipartite_for(s, req.parts, req.c, o));
  } else {
    throw InputError("unknown command '" + cmd + "'");
  }
  rec.command = cmd;
  rec.runtime_s = seconds_since(t0);
  return rec;
}

// ---------------------------------------------------------------------------
// sweeps

namespace {

struct Sample {
  std::string digest;
  std::vector<std::pair<std::string, double>> values;
  double margin = 0.0;
};

using SampleFn = std::function<Sample(const Dims&, Rng&)>;

struct SweepSpec {
  Dims dims;
  double tol;
  SampleFn run;
};

double for_value(const MultipartiteState& s, const Labels& a, const Labels& b, const Labels& c,
                 Backend backend = Backend::convex) {
  RecoveryOptions o;
  o.backend = backend;
  return fidelity_of_recovery(s, a, b, c, o).value;
}

MultipartiteState mixed(const Dims& dims, Rng& rng) {
  return random_density(dims, default_labels(static_cast<int>(dims.size())), product(dims), rng);
}

void require_dims(const Dims& dims, std::size_t n, const char* tag) {
  if (dims.size() != n)
    throw InputError(std::string(tag) + ": needs " + std::to_string(n) + " dimensions");
}

// (1 - eta) rho_cq + eta tau, with tau random and eta in [1e-4, 1e-2].
MultipartiteState near_cq(int dx, int db, Rng& rng) {
  MultipartiteState cq = random_cq(dx, db, rng);
  MultipartiteState tau = random_density({dx, db}, {"X", "B"}, dx * db, rng);
  double eta = std::pow(10.0, -4.0 + 2.0 * rng.uniform());
  return MultipartiteState({dx, db}, {"X", "B"}, (1.0 - eta) * cq.matrix() + eta * tau.matrix());
}

const std::map<std::string, SweepSpec>& registry() {
  static const std::map<std::string, SweepSpec> reg = {
      {"fr-inequality",
       {{2, 2, 2}, 1e-5,
        [](const Dims& d, Rng& rng) {
          require_dims(d, 3, "fr-inequality");
          auto s = mixed(d, rng);
          double i = cqmi(s, {"A"}, {"B"}, {"C"});
          double f = for_value(s, {"A"}, {"B"}, {"C"});
          return Sample{state_digest(s), {{"cqmi", i}, {"for", f}, {"ifr", -std::log2(f)}},
                        i + std::log2(f)};
        }}},
      {"duality",
       {{2, 2, 2, 2}, 5e-6,
        [](const Dims& d, Rng& rng) {
          require_dims(d, 4, "duality");
          auto s = random_pure(d, {"A", "B", "C", "D"}, rng).density();
          double fc = for_value(s, {"A"}, {"B"}, {"C"});
          double fd = for_value(s, {"A"}, {"B"}, {"D"});
          return Sample{state_digest(s), {{"for_c", fc}, {"for_d", fd}}, -std::abs(fc - fd)};
        }}},
      {"weak-chain",
       {{2, 2, 2, 2}, 1e-6,
        [](const Dims& d, Rng& rng) {
          require_dims(d, 4, "weak-chain");
          auto s = mixed(d, rng);
          double lhs = for_value(s, {"A", "C"}, {"B"}, {"D"});
          double rhs = for_value(s, {"A"}, {"B"}, {"C", "D"});
          return Sample{state_digest(s), {{"for_ac_b_d", lhs}, {"for_a_b_cd", rhs}}, rhs - lhs};
        }}},
      {"renyi-mono",
       {{2, 2, 2}, 1e-7,
        [](const Dims& d, Rng& rng) {
          require_dims(d, 3, "renyi-mono");
          auto s = mixed(d, rng);
          double i = cqmi(s, {"A"}, {"B"}, {"C"});
          double ih = renyi_cqmi(s, {"A"}, {"B"}, {"C"}, 0.5).value;
          return Sample{state_digest(s), {{"cqmi", i}, {"renyi_half", ih}}, i - ih};
        }}},
      {"ssa",
       {{2, 2, 2}, 1e-9,
        [](const Dims& d, Rng& rng) {
          require_dims(d, 3, "ssa");
          auto s = mixed(d, rng);
          double i = cqmi(s, {"A"}, {"B"}, {"C"});
          return Sample{state_digest(s), {{"cqmi", i}}, i};
        }}},
      {"petz-dominance",
       {{2, 2, 2}, 1e-7,
        [](const Dims& d, Rng& rng) {
          require_dims(d, 3, "petz-dominance");
          auto s = mixed(d, rng);
          double fp = for_value(s, {"A"}, {"B"}, {"C"}, Backend::petz);
          double fc = for_value(s, {"A"}, {"B"}, {"C"});
          double i = cqmi(s, {"A"}, {"B"}, {"C"});
          return Sample{state_digest(s),
                        {{"for_petz", fp}, {"for", fc}, {"cqmi", i}, {"neg_log_petz", -std::log2(fp)}},
                        fc - fp};
        }}},
      {"classical-cond",
       {{2, 2, 2, 2}, 1e-6,
        [](const Dims& d, Rng& rng) {
          require_dims(d, 4, "classical-cond");
          const int dx = d[3];
          Dims abc{d[0], d[1], d[2]};
          std::vector<double> p(dx);
          double total = 0.0;
          for (auto& v : p) total += (v = 0.05 + rng.uniform());
          CMatrix w = CMatrix::Zero(product(d), product(d));
          double avg = 0.0;
          for (int x = 0; x < dx; ++x) {
            p[x] /= total;
            auto wx = mixed(abc, rng);
            CMatrix proj = CMatrix::Zero(dx, dx);
            proj(x, x) = 1.0;
            w += p[x] * kron(wx.matrix(), proj);
            avg += p[x] * std::sqrt(for_value(wx, {"A"}, {"B"}, {"C"}));
          }
          MultipartiteState omega(d, {"A", "B", "C", "X"}, w);
          double lhs = std::sqrt(for_value(omega, {"A"}, {"B"}, {"C", "X"}));
          return Sample{state_digest(omega), {{"root_for_cx", lhs}, {"avg_root_for", avg}},
                        lhs - avg};
        }}},
      {"halpha-cq",
       {{2, 2}, 1e-7,
        [](const Dims& d, Rng& rng) {
          require_dims(d, 2, "halpha-cq");
          auto s = random_cq(d[0], d[1], rng);
          Sample out{state_digest(s), {}, std::numeric_limits<double>::infinity()};
          for (double alpha : {0.25, 0.5, 0.75, 1.25, 1.5, 2.0}) {
            Divergence h = conditional_renyi_entropy(s, {"X"}, {"B"}, alpha);
            out.values.emplace_back("h_" + std::to_string(alpha).substr(0, 4), h.value);
            out.margin = std::min(out.margin, h.value);
          }
          return out;
        }}},
      {"dfm-bracket",
       {{2, 2}, 1e-5,
        [](const Dims& d, Rng& rng) {
          require_dims(d, 2, "dfm-bracket");
          auto s = mixed(d, rng);
          DfmOptions o;
          double fs = dfm(s, {"A"}, {"B"}, o).f_value;
          o.backend = DfmBackend::ppt_relax;
          double fp = dfm(s, {"A"}, {"B"}, o).f_value;
          // qubit A is the exact regime: the bracket must close
          double margin = d[0] == 2 ? -std::abs(fp - fs) : fp - fs;
          return Sample{state_digest(s), {{"f_seesaw", fs}, {"f_ppt", fp}}, margin};
        }}},
      {"approx-faithful",
       {{2, 2}, 1e-4,
        [](const Dims& d, Rng& rng) {
          require_dims(d, 2, "approx-faithful");
          auto s = near_cq(d[0], d[1], rng);
          FixedPointWitness w = approx_fixed_point_witness(s, {"X"}, {"B"}, 1.0);
          DiscordBound db = discord_upper_from_fixed_point(s, {"X"}, {"B"}, w.channel);
          double disc = discord(s, {"X"}, {"B"}).value;
          return Sample{state_digest(s),
                        {{"trace_distance", w.trace_distance},
                         {"d_f", w.d_value},
                         {"sqrt_bound", w.bound},
                         {"discord", disc},
                         {"discord_bound", db.bound}},
                        std::min(w.bound - w.trace_distance, db.bound - disc)};
        }}},
  };
  return reg;
}

}  // namespace

const std::vector<std::string>& sweep_tags() {
  static const std::vector<std::string> tags = [] {
    std::vector<std::string> t;
    for (const auto& [k, v] : registry()) t.push_back(k);
    return t;
  }();
  return tags;
}

double default_sweep_tol(const std::string& tag) {
  auto it = registry().find(tag);
  if (it == registry().end()) throw InputError("unknown sweep tag '" + tag + "'");
  return it->second.tol;
}

std::string SweepReport::aggregate_json() const {
  ordered_json j;
  j["aggregate"] = true;
  j["tag"] = tag;
  j["seed"] = seed;
  j["samples"] = samples;
  j["tol"] = tol;
  j["min_margin"] = min_margin;
  j["violations"] = violations;
  j["failures"] = failures;
  return j.dump();
}

void SweepReport::write(std::ostream& os) const {
  for (const auto& r : records) os << r << '\n';
  os << aggregate_json() << '\n';
}

SweepReport run_sweep(const SweepConfig& cfg) {
  auto it = registry().find(cfg.tag);
  if (it == registry().end()) throw InputError("unknown sweep tag '" + cfg.tag + "'");
  if (cfg.samples < 1) throw InputError("samples must be at least 1");
  const SweepSpec& spec = it->second;
  const Dims dims = cfg.dims.empty() ? spec.dims : cfg.dims;
  for (int d : dims)
    if (d < 1) throw InputError("dimensions must be positive");
  // shape errors are input errors, not per-sample failures
  if (dims.size() != spec.dims.size())
    throw InputError(cfg.tag + ": needs " + std::to_string(spec.dims.size()) + " dimensions");

  const auto t0 = std::chrono::steady_clock::now();
  SweepReport rep;
  rep.tag = cfg.tag;
  rep.seed = cfg.seed;
  rep.samples = cfg.samples;
  rep.tol = cfg.tol >= 0.0 ? cfg.tol : spec.tol;
  rep.records.resize(cfg.samples);
  rep.margins.assign(cfg.samples, std::numeric_limits<double>::quiet_NaN());

#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < cfg.samples; ++k) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(k));
    ordered_json j;
    j["tag"] = cfg.tag;
    j["sample"] = k;
    try {
      Sample s = spec.run(dims, rng);
      j["digest"] = s.digest;
      ordered_json vals = ordered_json::object();
      for (const auto& [name, v] : s.values) vals[name] = v;
      j["values"] = vals;
      j["margin"] = s.margin;
      j["status"] = s.margin < -rep.tol ? "violation" : "ok";
      rep.margins[k] = s.margin;
    } catch (const std::exception& e) {
      j["status"] = "error";
      j["error"] = e.what();
    }
    rep.records[k] = j.dump();
  }

  rep.min_margin = std::numeric_limits<double>::infinity();
  for (double m : rep.margins) {
    if (std::isnan(m)) {
      ++rep.failures;
      continue;
    }
    rep.min_margin = std::min(rep.min_margin, m);
    if (m < -rep.tol) ++rep.violations;
  }
  if (rep.failures == rep.samples) rep.min_margin = 0.0;
  rep.runtime_s = seconds_since(t0);
  return rep;
}

}  // namespace recoverlib
