#include "recoverlib/stateio.hpp"

#include "recoverlib/channels.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace recoverlib {

namespace {

using nlohmann::json;

std::string num(double v) {
  if (v == 0.0) return "0";  // folds -0 as well
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_part(std::ostringstream& os, const CMatrix& m, bool imag) {
  os << "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    os << (r ? ",\n    [" : "\n    [");
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ", ";
      os << num(imag ? m(r, c).imag() : m(r, c).real());
    }
    os << "]";
  }
  os << "\n  ]";
}

CMatrix read_matrix(const json& re, const json& im, int n) {
  if (!re.is_array() || !im.is_array() || static_cast<int>(re.size()) != n ||
      static_cast<int>(im.size()) != n)
    throw InputError("state file: re/im must be " + std::to_string(n) + " rows");
  CMatrix m(n, n);
  for (int r = 0; r < n; ++r) {
    if (!re[r].is_array() || !im[r].is_array() || static_cast<int>(re[r].size()) != n ||
        static_cast<int>(im[r].size()) != n)
      throw InputError("state file: row " + std::to_string(r) + " must have " +
                       std::to_string(n) + " entries");
    for (int c = 0; c < n; ++c) m(r, c) = cplx(re[r][c].get<double>(), im[r][c].get<double>());
  }
  return m;
}

CMatrix random_state_matrix(int d, Rng& rng) {
  return random_density({d}, {"S"}, d, rng).matrix();
}

std::vector<double> random_distribution(int n, Rng& rng) {
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& v : p) total += (v = -std::log(1.0 - rng.uniform()));
  for (auto& v : p) v /= total;
  return p;
}

CMatrix basis_projector(int d, int x) {
  CMatrix m = CMatrix::Zero(d, d);
  m(x, x) = 1.0;
  return m;
}

}  // namespace

std::string state_to_json(const MultipartiteState& s) {
  std::ostringstream os;
  os << "{\n  \"dims\": [";
  for (std::size_t k = 0; k < s.dims().size(); ++k) os << (k ? ", " : "") << s.dims()[k];
  os << "],\n  \"labels\": [";
  for (std::size_t k = 0; k < s.labels().size(); ++k)
    os << (k ? ", " : "") << json(s.labels()[k]).dump();
  os << "],\n  \"re\": ";
  write_part(os, s.matrix(), false);
  os << ",\n  \"im\": ";
  write_part(os, s.matrix(), true);
  os << "\n}\n";
  return os.str();
}

MultipartiteState state_from_json(const std::string& text, std::vector<std::string>* warnings) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("state file: parse error: ") + e.what());
  }
  for (const char* key : {"dims", "labels", "re", "im"})
    if (!j.contains(key)) throw InputError(std::string("state file: missing field '") + key + "'");
  Dims dims;
  Labels labels;
  try {
    dims = j["dims"].get<Dims>();
    labels = j["labels"].get<Labels>();
  } catch (const json::exception& e) {
    throw InputError(std::string("state file: ") + e.what());
  }
  if (dims.empty() || dims.size() != labels.size())
    throw InputError("state file: dims and labels must be non-empty and of equal length");
  for (int d : dims)
    if (d < 1) throw InputError("state file: dimensions must be positive");
  const int n = product(dims);
  CMatrix m;
  try {
    m = read_matrix(j["re"], j["im"], n);
  } catch (const json::exception& e) {
    throw InputError(std::string("state file: ") + e.what());
  }

  for (int r = 0; r < n; ++r)
    for (int c = r; c < n; ++c) {
      double dev = std::abs(m(r, c) - std::conj(m(c, r)));
      if (dev > kLoadHermitianTol) {
        std::ostringstream os;
        os << "state file: not Hermitian at entry (" << r << ", " << c << "), deviation " << dev
           << " > " << kLoadHermitianTol;
        throw InputError(os.str());
      }
    }
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > kLoadTraceTol) {
    std::ostringstream os;
    os << "state file: trace " << num(tr) << " differs from 1 by more than " << kLoadTraceTol;
    throw InputError(os.str());
  }
  if (std::abs(tr - 1.0) > 1e-12) {
    if (warnings) warnings->push_back("trace " + num(tr) + " renormalized to 1");
    m /= tr;
  }
  return MultipartiteState(std::move(dims), std::move(labels), std::move(m));
}

MultipartiteState load_state(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open state file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return state_from_json(buf.str(), warnings);
}

void save_state(const MultipartiteState& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write state file '" + path + "'");
  out << state_to_json(s);
}

Labels default_labels(int n) {
  Labels out;
  for (int k = 0; k < n; ++k) out.push_back(std::string(1, static_cast<char>('A' + k)));
  return out;
}

MultipartiteState random_cq(int dx, int db, Rng& rng) {
  auto p = random_distribution(dx, rng);
  CMatrix m = CMatrix::Zero(dx * db, dx * db);
  for (int x = 0; x < dx; ++x) m += p[x] * kron(basis_projector(dx, x), random_state_matrix(db, rng));
  return MultipartiteState({dx, db}, {"X", "B"}, m);
}

MultipartiteState random_markov_chain(int da, int db, int dc, Rng& rng) {
  auto p = random_distribution(dc, rng);
  const int n = da * db * dc;
  CMatrix m = CMatrix::Zero(n, n);
  for (int x = 0; x < dc; ++x) {
    CMatrix ra = random_state_matrix(da, rng);
    CMatrix rb = random_state_matrix(db, rng);
    m += p[x] * kron(kron(ra, rb), basis_projector(dc, x));
  }
  return MultipartiteState({da, db, dc}, {"A", "B", "C"}, m);
}

MultipartiteState make_state(const std::string& kind, const MakeParams& params, Rng& rng) {
  if (kind == "bell") return max_entangled(2);
  if (kind == "max-entangled") return max_entangled(params.d);
  if (kind == "classical-copy") return classical_copy(params.d);
  if (kind == "ghz") {
    return ghz_vector(params.parties, params.d, default_labels(params.parties)).density();
  }
  if (kind == "werner") {
    if (params.p < 0.0 || params.p > 1.0) throw InputError("werner: p must lie in [0, 1]");
    const int d = params.d;
    CMatrix m = params.p * max_entangled(d).matrix() +
                (1.0 - params.p) * CMatrix::Identity(d * d, d * d) / static_cast<double>(d * d);
    return MultipartiteState({d, d}, {"A", "B"}, m);
  }
  if (kind == "private") {
    const int d = params.d;
    std::vector<CMatrix> twist;
    for (int i = 0; i < d; ++i) {
      if (params.twisting == "identity") {
        twist.push_back(CMatrix::Identity(4, 4));
      } else if (params.twisting == "phase") {
        CMatrix v = CMatrix::Zero(4, 4);
        for (int k = 0; k < 4; ++k) v(k, k) = std::polar(1.0, 2.0 * std::numbers::pi * i * k / d);
        twist.push_back(v);
      } else if (params.twisting == "random") {
        twist.push_back(random_unitary(4, rng));
      } else {
        throw InputError("private: twisting must be identity, phase or random");
      }
    }
    MultipartiteState shield = random_density({2, 2}, {"A'", "B'"}, 4, rng);
    return private_state(d, {2, 2}, twist, shield);
  }
  if (kind == "random") {
    Dims dims = params.dims.empty() ? Dims{2, 2} : params.dims;
    int rank = params.rank > 0 ? params.rank : product(dims);
    return random_density(dims, default_labels(static_cast<int>(dims.size())), rank, rng);
  }
  if (kind == "cq") {
    Dims dims = params.dims.empty() ? Dims{2, 2} : params.dims;
    if (dims.size() != 2) throw InputError("cq: needs two dimensions");
    return random_cq(dims[0], dims[1], rng);
  }
  if (kind == "markov-chain") {
    Dims dims = params.dims.empty() ? Dims{2, 2, 2} : params.dims;
    if (dims.size() != 3) throw InputError("markov-chain: needs three dimensions");
    return random_markov_chain(dims[0], dims[1], dims[2], rng);
  }
  throw InputError("unknown state kind '" + kind + "'");
}

std::string state_digest(const MultipartiteState& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : state_to_json(s)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace recoverlib
