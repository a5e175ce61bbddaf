#include <doctest.h>

#include "recoverlib/infoquant.hpp"
#include "recoverlib/squash.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

using namespace recoverlib;

namespace {

const Labels kA{"A"}, kB{"B"};

GseOptions small(int env, int sweeps = 3) {
  GseOptions o;
  o.env_dim = env;
  o.restarts = 1;
  o.sweeps = sweeps;
  return o;
}

MultipartiteState schmidt_state(double l0) {
  CVector v = CVector::Zero(4);
  v(0) = std::sqrt(l0);
  v(3) = std::sqrt(1.0 - l0);
  return PureStateVector({2, 2}, {"A", "B"}, v).density();
}

CVector random_ket(int d, Rng& rng) { return random_pure({d}, {"A"}, rng).amplitudes(); }

// Extension of rho on (A, B, E) produced by a heuristic run.
MultipartiteState extension_of(const MultipartiteState& rho, const GseResult& g) {
  Purified p = canonical_purification(rho.matrix());
  CMatrix om = extension_from_squashing(p, g.squashing->choi(), g.env_dim);
  return MultipartiteState({rho.dim_of("A"), rho.dim_of("B"), g.env_dim}, {"A", "B", "E"}, om);
}

double ext_f(const MultipartiteState& om) {
  return extension_for(om.matrix(), om.dim_of("A"), om.dim_of("B"), om.dim_of("E")).value;
}

}  // namespace

TEST_CASE("pure-state closed form") {
  CVector prod = CVector::Zero(4);
  prod(0) = 1.0;
  CHECK(gse_pure(PureStateVector({2, 2}, {"A", "B"}, prod).density(), kA, kB).e_value ==
        doctest::Approx(0.0).epsilon(1e-12));
  auto bell = gse_pure(max_entangled(2), kA, kB);
  CHECK(bell.e_value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bell.bound == BoundKind::exact);
  CHECK(gse_pure(schmidt_state(0.75), kA, kB).e_value ==
        doctest::Approx(-std::log2(0.75)).epsilon(1e-12));
  CHECK(gse_pure(schmidt_state(0.75), kA, kB).e_value == doctest::Approx(0.415).epsilon(1e-3));
  CHECK_THROWS_AS(gse_pure(maximally_mixed({2, 2}, {"A", "B"}), kA, kB), InputError);
}

TEST_CASE("heuristic on pure states matches the closed form") {
  auto bell = gse_heuristic(max_entangled(2), kA, kB, small(0, 2));
  CHECK(bell.e_value == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(bell.bound == BoundKind::upper);
  CHECK(std::abs(bell.e_value + 0.5 * std::log2(bell.f_sq_value)) < 1e-9);

  Rng rng(81);
  for (int k = 0; k < 3; ++k) {
    auto phi = random_pure({2, 2}, {"A", "B"}, rng).density();
    auto h = gse_heuristic(phi, kA, kB, small(2, 2));
    CHECK(std::abs(h.e_value - gse_pure(phi, kA, kB).e_value) < 1e-5);
  }
  auto sc = gse_heuristic(schmidt_state(0.75), kA, kB, small(2, 2));
  CHECK(sc.e_value == doctest::Approx(-std::log2(0.75)).epsilon(1e-5));
}

TEST_CASE("heuristic certificates re-evaluate") {
  Rng rng(82);
  auto rho = random_density({2, 2}, {"A", "B"}, 2, rng);
  auto g = gse_heuristic(rho, kA, kB, small(2));
  REQUIRE(g.squashing);
  REQUIRE(g.recovery);
  CHECK(is_cptp(g.squashing->choi(), g.squashing->in_dim(), g.env_dim));
  auto om = extension_of(rho, g);
  // the extension really extends rho
  CHECK((partial_trace(om, {"A", "B"}).matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(ext_f(om) == doctest::Approx(g.f_sq_value).epsilon(1e-6));
  // and the reported recovery attains the value
  auto rec = permute_systems(apply(*g.recovery, partial_trace(om, {"B", "E"}), {"E"}, {"A", "E"}),
                             {"A", "B", "E"});
  CHECK(fidelity(rec, om) == doctest::Approx(g.f_sq_value).epsilon(1e-6));
  // extension -> squashing channel -> extension round trip
  auto sq = squashing_from_extension(rho.matrix(), om.matrix(), 2, 2, 2);
  CMatrix back = extension_from_squashing(canonical_purification(rho.matrix()), sq.choi(), 2);
  CHECK((back - om.matrix()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("separable witness extensions") {
  Rng rng(83);
  CVector z0 = CVector::Zero(2), z1 = CVector::Zero(2);
  z0(0) = 1.0;
  z1(1) = 1.0;
  auto single = separable_witness_extension({{1.0, z0, z1}});
  CHECK(single.fidelity == doctest::Approx(1.0).epsilon(1e-8));
  auto classical = separable_witness_extension({{0.5, z0, z0}, {0.5, z1, z1}});
  CHECK(classical.fidelity == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(separable_witness_extension({{0.7, z0, z0}}), InputError);

  std::vector<SeparableTerm> terms;
  RVector w(4);
  for (int x = 0; x < 4; ++x) w(x) = rng.uniform() + 0.1;
  w /= w.sum();
  for (int x = 0; x < 4; ++x) terms.push_back({w(x), random_ket(2, rng), random_ket(2, rng)});
  auto wit = separable_witness_extension(terms);
  CHECK(wit.fidelity == doctest::Approx(1.0).epsilon(1e-8));
  // recompute F(omega, R(omega_BE)) from the returned pieces
  auto om = wit.extension;
  auto rec = permute_systems(apply(wit.recovery, partial_trace(om, {"B", "E"}), {"E"}, {"A", "E"}),
                             {"A", "B", "E"});
  CHECK(fidelity(rec, om) == doctest::Approx(1.0).epsilon(1e-8));
  auto rho = separable_state(terms);
  CHECK((partial_trace(om, {"A", "B"}).matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-12);

  // warm-started heuristic reaches e = 0 on the separable state
  GseOptions o = small(4, 2);
  o.warm_start = squashing_from_extension(rho.matrix(), om.matrix(), 2, 2, 4);
  auto g = gse_heuristic(rho, kA, kB, o);
  CHECK(g.e_value == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("private state caps") {
  Rng rng(84);
  auto sigma = random_density({2, 2}, {"A'", "B'"}, 4, rng);
  const std::vector<CMatrix> no_twist(2, CMatrix::Identity(4, 4));
  auto trivial = [](const MultipartiteState& g) {
    int r = private_purification_rank(g);
    return QuantumChannel({r}, {1}, CMatrix::Identity(r, r));
  };
  // product shield: the bound 1/d^2 is attained
  auto prod_shield = tensor(random_density({2}, {"A'"}, 2, rng), random_density({2}, {"B'"}, 2, rng));
  auto plain = private_state(2, {2, 2}, no_twist, prod_shield);
  CHECK(private_state_fidelity_cap(plain, trivial(plain)) == doctest::Approx(0.25).epsilon(1e-5));
  // a correlated shield can only lower it
  auto plain_corr = private_state(2, {2, 2}, no_twist, sigma);
  CHECK(private_state_fidelity_cap(plain_corr, trivial(plain_corr)) <= 0.25 + 1e-5);

  CMatrix swap = CMatrix::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) swap(2 * j + i, 2 * i + j) = 1.0;
  auto twisted = private_state(2, {2, 2}, {CMatrix::Identity(4, 4), swap}, sigma);
  int rt = private_purification_rank(twisted);
  for (int k = 0; k < 2; ++k) {
    auto s = random_channel({rt}, {2}, 2, rng);
    CHECK(private_state_fidelity_cap(twisted, s) <= 0.25 + 1e-5);
  }

  auto shield3 = random_density({1, 2}, {"A'", "B'"}, 2, rng);
  auto p3 = private_state(3, {1, 2}, std::vector<CMatrix>(3, CMatrix::Identity(2, 2)), shield3);
  CHECK(private_state_fidelity_cap(p3, trivial(p3)) <= 1.0 / 9.0 + 1e-5);
}

TEST_CASE("1-LOCC monotonicity at certificate level") {
  Rng rng(85);
  for (int k = 0; k < 30; ++k) {
    auto rho = random_density({2, 2}, {"A", "B"}, 1 + k % 4, rng);
    auto g = gse_heuristic(rho, kA, kB, small(2, 2));
    auto ch = random_channel({2}, {2}, 1 + k % 3, rng);
    const std::string side = k % 2 ? "A" : "B";
    auto om = permute_systems(apply(ch, extension_of(rho, g), {side}, {side}), {"A", "B", "E"});
    auto processed = partial_trace(om, {"A", "B"});
    GseOptions o = small(2, 2);
    o.warm_start = squashing_from_extension(processed.matrix(), om.matrix(), 2, 2, 2);
    auto gp = gse_heuristic(processed, kA, kB, o);
    CHECK(gp.e_value <= g.e_value + 1e-4);
  }
}

TEST_CASE("convexity at certificate level") {
  Rng rng(86);
  for (int k = 0; k < 3; ++k) {
    double p0 = 0.3 + 0.4 * rng.uniform();
    double p[2] = {p0, 1 - p0};
    CMatrix mix = CMatrix::Zero(4, 4), flagged = CMatrix::Zero(16, 16);
    double avg = 0.0;
    for (int x = 0; x < 2; ++x) {
      auto r = random_density({2, 2}, {"A", "B"}, 2, rng);
      auto g = gse_heuristic(r, kA, kB, small(2, 2));
      avg += p[x] * g.e_value;
      mix += p[x] * r.matrix();
      CMatrix f = CMatrix::Zero(2, 2);
      f(x, x) = 1.0;
      flagged += p[x] * kron(extension_of(r, g).matrix(), f);
    }
    MultipartiteState rho({2, 2}, {"A", "B"}, mix);
    // one sweep evaluates the composed certificate itself
    GseOptions o = small(4, 1);
    o.warm_start = squashing_from_extension(mix, flagged, 2, 2, 4);
    CHECK(gse_heuristic(rho, kA, kB, o).e_value <= avg + 1e-4);
  }
}

TEST_CASE("subadditivity at certificate level") {
  Rng rng(87);
  auto rho = random_density({2, 2}, {"A", "B"}, 2, rng);
  auto tau = random_density({2, 2}, {"A", "B"}, 2, rng);
  auto gr = gse_heuristic(rho, kA, kB, small(2, 2));
  auto gt = gse_heuristic(tau, kA, kB, small(1, 2));
  auto er = extension_of(rho, gr);
  auto et = extension_of(tau, gt);
  MultipartiteState e2(et.dims(), {"A2", "B2", "E2"}, et.matrix());
  auto joint = permute_systems(tensor(er, e2), {"A", "A2", "B", "B2", "E", "E2"});
  double f = extension_for(joint.matrix(), 4, 4, gr.env_dim * gt.env_dim).value;
  CHECK(-0.5 * std::log2(f) <= gr.e_value + gt.e_value + 1e-4);
}

TEST_CASE("continuity at certificate level") {
  // One squashing channel applied to Uhlmann-aligned purifications of rho and sigma.
  Rng rng(88);
  for (int k = 0; k < 5; ++k) {
    CMatrix rho = random_density({2, 2}, {"A", "B"}, 4, rng).matrix();
    CMatrix noise = random_density({2, 2}, {"A", "B"}, 4, rng).matrix();
    double delta = 2e-3 * (1 + k);
    CMatrix sigma = (1 - delta) * rho + delta * noise;
    double eps = 1.0 - fidelity(rho, sigma);

    CMatrix sr = psd_sqrt(rho), ss = psd_sqrt(sigma);
    Eigen::JacobiSVD<CMatrix> svd(ss * sr, Eigen::ComputeFullU | Eigen::ComputeFullV);
    CMatrix w = svd.matrixU() * svd.matrixV().adjoint();  // polar factor of ss * sr
    auto purify_with = [](const CMatrix& m) {
      CVector v(16);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) v(i * 4 + j) = m(i, j);
      return PureStateVector({2, 2, 4}, {"A", "B", "P"}, v).density();
    };
    auto psi_r = purify_with(sr);
    auto psi_s = purify_with(w.adjoint() * ss);
    CHECK(fidelity(psi_r, psi_s) == doctest::Approx(1.0 - eps).epsilon(1e-8));

    auto sq = random_channel({4}, {2}, 3, rng);
    auto om_r = permute_systems(apply(sq, psi_r, {"P"}, {"E"}), {"A", "B", "E"});
    auto om_s = permute_systems(apply(sq, psi_s, {"P"}, {"E"}), {"A", "B", "E"});
    CHECK(std::abs(ext_f(om_r) - ext_f(om_s)) <= 8.0 * std::sqrt(eps) + 1e-4);
  }
}

TEST_CASE("local isometric invariance") {
  Rng rng(89);
  for (int k = 0; k < 3; ++k) {
    auto phi = random_pure({2, 2}, {"A", "B"}, rng).density();
    Isometry v({2}, {3}, random_isometry(3, 2, rng));
    const std::string side = k % 2 ? "A" : "B";
    auto emb = permute_systems(apply(isometry_channel(v), phi, {side}, {side}), {"A", "B"});
    CHECK(gse_pure(emb, kA, kB).e_value == doctest::Approx(gse_pure(phi, kA, kB).e_value).epsilon(1e-12));
    CHECK(std::abs(gse_heuristic(emb, kA, kB, small(2, 2)).e_value -
                   gse_heuristic(phi, kA, kB, small(2, 2)).e_value) < 1e-5);
  }
  // the canonical extension (one sweep from the purification) of a mixed state
  auto rho = random_density({2, 2}, {"A", "B"}, 2, rng);
  Isometry v({2}, {3}, random_isometry(3, 2, rng));
  auto emb = permute_systems(apply(isometry_channel(v), rho, {"A"}, {"A"}), {"A", "B"});
  CHECK(std::abs(gse_heuristic(emb, kA, kB, small(2, 1)).e_value -
                 gse_heuristic(rho, kA, kB, small(2, 1)).e_value) < 1e-5);
}
