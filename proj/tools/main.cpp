// recoverlib command-line front end.
//
//   recoverlib make <kind> [--d] [--p] [--dims] [--rank] [--parties] [--twisting] [--seed] [--out]
//   recoverlib compute <command> <state.json> --a A [--b B] [--c C] [--part G]... [flags]
//   recoverlib sweep <tag> [--dims a,b,c] [--samples N] [--seed S] [--tol T] [--out path]
//
// Exit codes: 0 success, 1 input error, 2 solver non-convergence, 3 sweep
// violation.

#include "recoverlib/experiments.hpp"
#include "recoverlib/kernels.hpp"
#include "recoverlib/stateio.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace recoverlib;

namespace {

Labels split_group(const std::string& s) {
  Labels out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

Dims parse_dims(const std::string& s) {
  Dims out;
  for (const auto& t : split_group(s)) {
    try {
      std::size_t pos = 0;
      int v = std::stoi(t, &pos);
      if (pos != t.size()) throw std::invalid_argument(t);
      out.push_back(v);
    } catch (const std::exception&) {
      throw InputError("bad dimension list '" + s + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
  omp_set_num_threads(kernels::thread_count());
#endif
  CLI::App app{"Fidelity of recovery, squashed entanglement and measurement recoverability"};
  app.require_subcommand(1);

  // make
  auto* make = app.add_subcommand("make", "Write a named state as JSON");
  std::string kind, make_out, make_dims;
  MakeParams mp;
  std::uint64_t make_seed = 0;
  make->add_option("kind", kind,
                   "bell | max-entangled | classical-copy | ghz | werner | private | random | cq | "
                   "markov-chain")
      ->required();
  make->add_option("--d", mp.d, "local dimension");
  make->add_option("--p", mp.p, "Werner weight on the maximally entangled state");
  make->add_option("--dims", make_dims, "comma-separated dimensions");
  make->add_option("--rank", mp.rank, "ancilla dimension for random states (0 = full)");
  make->add_option("--parties", mp.parties, "GHZ parties");
  make->add_option("--twisting", mp.twisting, "identity | phase | random");
  make->add_option("--seed", make_seed);
  make->add_option("--out", make_out, "output path (stdout when absent)");

  // compute
  auto* comp = app.add_subcommand("compute", "Evaluate one quantity on a state file");
  ComputeRequest req;
  std::string state_path, ga, gb, gc;
  std::vector<std::string> parts;
  comp->add_option("command", req.command,
                   "for | ifr | cqmi | renyi-cqmi | gse | gse-pure | dfm | dfm-pure | discord | mfor")
      ->required();
  comp->add_option("state", state_path, "state file")->required();
  comp->add_option("--a", ga, "group A (comma-separated labels)");
  comp->add_option("--b", gb, "group B");
  comp->add_option("--c", gc, "conditioning group C");
  comp->add_option("--part", parts, "mfor group A_k (repeat, in order)");
  comp->add_option("--backend", req.backend, "petz | seesaw | convex; for dfm: seesaw | ppt-relax");
  comp->add_option("--tol", req.tol);
  comp->add_option("--alpha", req.alpha, "Renyi order");
  comp->add_option("--env-dim", req.env_dim, "extension dimension for gse (0 = |A||B|)");
  comp->add_option("--restarts", req.restarts);
  comp->add_option("--seed", req.seed);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Randomized inequality sweep, JSON lines");
  SweepConfig cfg;
  std::string sweep_dims, sweep_out;
  std::string tags_help;
  for (const auto& t : sweep_tags()) tags_help += (tags_help.empty() ? "" : " | ") + t;
  sweep->add_option("tag", cfg.tag, tags_help)->required();
  sweep->add_option("--dims", sweep_dims, "comma-separated dimensions");
  sweep->add_option("--samples", cfg.samples);
  sweep->add_option("--seed", cfg.seed);
  sweep->add_option("--tol", cfg.tol, "violation tolerance (default per tag)");
  sweep->add_option("--out", sweep_out, "report path (stdout when absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*make) {
      if (!make_dims.empty()) mp.dims = parse_dims(make_dims);
      Rng rng(make_seed);
      MultipartiteState s = make_state(kind, mp, rng);
      if (make_out.empty())
        std::cout << state_to_json(s);
      else
        save_state(s, make_out);
      return 0;
    }

    if (*comp) {
      std::vector<std::string> warnings;
      MultipartiteState s = load_state(state_path, &warnings);
      req.a = split_group(ga);
      req.b = split_group(gb);
      req.c = split_group(gc);
      for (const auto& p : parts) req.parts.push_back(split_group(p));
      ComputeRecord rec;
      try {
        rec = compute(req, s);
      } catch (const SolverError& e) {
        rec.command = req.command;
        rec.converged = false;
        rec.gap = e.gap;
        rec.primal_infeasibility = e.primal_infeas;
        rec.dual_infeasibility = e.dual_infeas;
        rec.iterations = e.iterations;
        rec.warnings.push_back(e.what());
        rec.value = std::numeric_limits<double>::quiet_NaN();
      }
      rec.warnings.insert(rec.warnings.begin(), warnings.begin(), warnings.end());
      std::cout << rec.to_json() << std::endl;
      return rec.converged ? 0 : 2;
    }

    if (*sweep) {
      if (!sweep_dims.empty()) cfg.dims = parse_dims(sweep_dims);
      SweepReport rep = run_sweep(cfg);
      if (sweep_out.empty()) {
        rep.write(std::cout);
      } else {
        std::ofstream out(sweep_out);
        if (!out) throw InputError("cannot write report '" + sweep_out + "'");
        rep.write(out);
      }
      std::cerr << cfg.tag << ": " << rep.samples << " samples, " << rep.violations
                << " violations, " << rep.failures << " failures, min margin " << rep.min_margin
                << ", " << rep.runtime_s << " s\n";
      return rep.violations > 0 ? 3 : 0;
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const SolverError& e) {
    std::cerr << "solver did not converge: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
