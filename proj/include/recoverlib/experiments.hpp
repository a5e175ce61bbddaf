#ifndef RECOVERLIB_EXPERIMENTS_HPP
#define RECOVERLIB_EXPERIMENTS_HPP

#include "recoverlib/qcore.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace recoverlib {

struct ComputeRequest {
  std::string command;
  Labels a, b, c;
  /// Groups A_1, ..., A_l for mfor.
  std::vector<Labels> parts;
  /// Empty selects the command's default backend.
  std::string backend;
  double tol = 1e-7;
  double alpha = 0.5;
  int env_dim = 0;
  int restarts = 5;
  std::uint64_t seed = 0;
};

struct ComputeRecord {
  std::string command;
  double value = 0.0;
  std::string bound;
  std::string backend;
  double gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  bool converged = true;
  double runtime_s = 0.0;
  /// Secondary quantities (certificate value, f_sq, ...), in insertion order.
  std::vector<std::pair<std::string, double>> extra;
  std::vector<std::string> warnings;

  std::string to_json() const;
};

/// Commands: for, ifr, cqmi, renyi-cqmi, gse, gse-pure, dfm, dfm-pure,
/// discord, mfor. Throws InputError / SolverError.
ComputeRecord compute(const ComputeRequest& req, const MultipartiteState& s);

const std::vector<std::string>& sweep_tags();

struct SweepConfig {
  std::string tag;
  /// Empty selects the tag's default.
  Dims dims;
  int samples = 10;
  std::uint64_t seed = 0;
  /// Negative selects the tag's default tolerance.
  double tol = -1.0;
};

struct SweepReport {
  std::string tag;
  std::uint64_t seed = 0;
  int samples = 0;
  double tol = 0.0;
  /// One JSON object per sample, sorted by sample index.
  std::vector<std::string> records;
  std::vector<double> margins;
  double min_margin = 0.0;
  int violations = 0;
  int failures = 0;
  double runtime_s = 0.0;

  /// Trailing aggregate line (runtime excluded so reports are byte-stable).
  std::string aggregate_json() const;
  void write(std::ostream& os) const;
};

double default_sweep_tol(const std::string& tag);

/// Runs the named inequality on random instances; sample k draws from
/// Rng(seed, k), so the report does not depend on the thread count.
SweepReport run_sweep(const SweepConfig& cfg);

}  // namespace recoverlib

#endif  // RECOVERLIB_EXPERIMENTS_HPP
