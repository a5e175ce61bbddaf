// Schur-complement kernel timings: serial vs OpenMP vs the dense reference.
//
//   bench_kernels [reps]
//
// RECOVERLIB_THREADS caps the OpenMP thread count.

#include "recoverlib/kernels.hpp"
#include "recoverlib/qcore.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>

using namespace recoverlib;

namespace {

struct Instance {
  sdp::RealSdp problem;
  std::vector<RMatrix> x;
  std::vector<RMatrix> s_inv;
};

RMatrix random_pd(int n, Rng& rng) {
  RMatrix g(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) g(r, c) = rng.normal();
  return g * g.transpose() / n + RMatrix::Identity(n, n);
}

// Each constraint touches every block with `fill` of its upper triangle.
Instance make_instance(const std::vector<int>& blocks, int m, double fill, std::uint64_t seed) {
  Rng rng(seed);
  Instance in;
  in.problem.block_sizes = blocks;
  for (int n : blocks) {
    in.problem.objective.push_back(RMatrix::Zero(n, n));
    in.x.push_back(random_pd(n, rng));
    in.s_inv.push_back(random_pd(n, rng));
  }
  in.problem.rhs = RVector::Zero(m);
  for (int i = 0; i < m; ++i) {
    std::vector<sdp::SymEntry> entries;
    for (std::size_t b = 0; b < blocks.size(); ++b)
      for (int r = 0; r < blocks[b]; ++r)
        for (int c = r; c < blocks[b]; ++c)
          if (rng.uniform() < fill) entries.push_back({static_cast<int>(b), r, c, rng.normal()});
    in.problem.constraints.push_back(std::move(entries));
  }
  return in;
}

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
  struct Case {
    const char* name;
    std::vector<int> blocks;
    int m;
    double fill;
  };
  const Case cases[] = {
      {"small-sparse", {16, 32}, 64, 0.02},
      {"for-2x2x2", {32, 64}, 160, 0.05},
      {"extension-e4", {40, 64}, 288, 0.08},
      {"dense-block", {64}, 256, 0.6},
  };
  std::printf("threads %d\n", kernels::thread_count());
  std::printf("%-14s %6s %10s %10s %10s %8s %12s\n", "case", "m", "serial_ms", "omp_ms",
              "ref_ms", "speedup", "max|diff|");
  for (const auto& c : cases) {
    Instance in = make_instance(c.blocks, c.m, c.fill, 42);
    RMatrix serial, par, ref;
    double ts = best_of(reps, [&] { serial = kernels::schur_complement(in.problem, in.x, in.s_inv, false); });
    double tp = best_of(reps, [&] { par = kernels::schur_complement(in.problem, in.x, in.s_inv, true); });
    double tr = -1.0;
    double diff = (serial - par).cwiseAbs().maxCoeff();
    if (c.m <= 160) {
      tr = best_of(1, [&] { ref = kernels::schur_complement_reference(in.problem, in.x, in.s_inv); });
      diff = std::max(diff, (serial - ref).cwiseAbs().maxCoeff() / std::max(1.0, ref.cwiseAbs().maxCoeff()));
    }
    std::printf("%-14s %6d %10.2f %10.2f %10.2f %8.2f %12.3e\n", c.name, c.m, ts, tp, tr, ts / tp,
                diff);
  }
  return 0;
}
