#ifndef RECOVERLIB_STATEIO_HPP
#define RECOVERLIB_STATEIO_HPP

#include "recoverlib/qcore.hpp"

#include <string>
#include <vector>

namespace recoverlib {

/// Traces within this distance of one are renormalized on load (with a
/// warning); anything further off is rejected.
inline constexpr double kLoadTraceTol = 1e-3;
inline constexpr double kLoadHermitianTol = 1e-9;

/// JSON text {"dims", "labels", "re", "im"} with 17 significant digits.
std::string state_to_json(const MultipartiteState& s);
MultipartiteState state_from_json(const std::string& text, std::vector<std::string>* warnings = nullptr);

MultipartiteState load_state(const std::string& path, std::vector<std::string>* warnings = nullptr);
void save_state(const MultipartiteState& s, const std::string& path);

struct MakeParams {
  int d = 2;
  double p = 0.5;
  Dims dims;
  int rank = 0;
  int parties = 3;
  std::string twisting = "phase";
};

/// Named constructions: bell, max-entangled, classical-copy, ghz, werner,
/// private, random, cq, markov-chain.
MultipartiteState make_state(const std::string& kind, const MakeParams& params, Rng& rng);

/// Random sum_x p(x) |x><x|_X (x) rho_B^x.
MultipartiteState random_cq(int dx, int db, Rng& rng);

/// Random sum_x p(x) rho_A^x (x) rho_B^x (x) |x><x|_C.
MultipartiteState random_markov_chain(int da, int db, int dc, Rng& rng);

/// Default labels A, B, C, ... for n systems.
Labels default_labels(int n);

/// FNV-1a digest of the state's text form, as 16 hex digits.
std::string state_digest(const MultipartiteState& s);

}  // namespace recoverlib

#endif  // RECOVERLIB_STATEIO_HPP
