#include <doctest.h>

#include "recoverlib/channels.hpp"
#include "recoverlib/infoquant.hpp"
#include "recoverlib/stateio.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

using namespace recoverlib;

namespace {

// Oracles below use Eigen's solver directly rather than the library helpers.
CMatrix mat_fn(const CMatrix& h, double (*f)(double)) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  RVector v = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * v.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

double log2_safe(double x) { return x > 1e-300 ? std::log2(x) : 0.0; }

double oracle_entropy(const CMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
  double h = 0.0;
  for (double l : es.eigenvalues())
    if (l > 1e-15) h -= l * std::log2(l);
  return h;
}

double oracle_relative_entropy(const CMatrix& rho, const CMatrix& sigma) {
  return (rho * (mat_fn(rho, log2_safe) - mat_fn(sigma, log2_safe))).trace().real();
}

CMatrix diag(std::initializer_list<double> d) {
  CMatrix m = CMatrix::Zero(d.size(), d.size());
  int k = 0;
  for (double v : d) {
    m(k, k) = v;
    ++k;
  }
  return m;
}

CMatrix ket_plus() { return CMatrix::Constant(2, 2, 0.5); }

MultipartiteState ghz3() {
  CMatrix g = CMatrix::Zero(8, 8);
  g(0, 0) = g(0, 7) = g(7, 0) = g(7, 7) = 0.5;
  return MultipartiteState({2, 2, 2}, {"A", "B", "C"}, g);
}

}  // namespace

TEST_CASE("fidelity examples") {
  Rng rng(41);
  auto r = random_density({3}, {"A"}, 3, rng).matrix();
  CHECK(fidelity(r, r) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(fidelity(diag({1, 0}), diag({0, 1})) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fidelity(diag({1, 0}), ket_plus()) == doctest::Approx(0.5).epsilon(1e-12));

  auto phi = max_entangled(2);
  auto pi_phi = tensor(maximally_mixed({2}, {"A"}), partial_trace(phi, {"B"}));
  CHECK(fidelity(phi.matrix(), pi_phi.matrix()) == doctest::Approx(0.25).epsilon(1e-10));

  for (int k = 0; k < 50; ++k) {
    auto p = random_density({2, 2}, {"A", "B"}, 1 + k % 4, rng).matrix();
    auto q = random_density({2, 2}, {"A", "B"}, 1 + (k / 4) % 4, rng).matrix();
    double f = fidelity(p, q);
    CHECK(std::abs(f - fidelity(q, p)) < 1e-10);
    CHECK(f >= -1e-12);
    CHECK(f <= 1.0 + 1e-9);
    CHECK(root_fidelity(p, q) == doctest::Approx(std::sqrt(f)).epsilon(1e-10));
  }
  // pure-state oracle: |<psi|phi>|^2
  for (int k = 0; k < 20; ++k) {
    CVector a = random_pure({3}, {"A"}, rng).amplitudes(), b = random_pure({3}, {"A"}, rng).amplitudes();
    double ov = std::norm(a.dot(b));
    CHECK(fidelity(CMatrix(a * a.adjoint()), CMatrix(b * b.adjoint())) ==
          doctest::Approx(ov).epsilon(1e-9));
  }
  CHECK_THROWS_AS(fidelity(diag({1.2, -0.2}), diag({0.5, 0.5})), InputError);
}

TEST_CASE("distances") {
  CMatrix z0 = diag({1, 0}), z1 = diag({0, 1});
  CHECK(trace_distance(z0, z0) == doctest::Approx(0.0));
  CHECK(purified_distance(z0, z0) == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(trace_distance(z0, z1) == doctest::Approx(2.0));
  CHECK(purified_distance(z0, z1) == doctest::Approx(1.0));
  Rng rng(42);
  for (int k = 0; k < 20; ++k) {
    RVector p(4), q(4);
    for (int i = 0; i < 4; ++i) {
      p(i) = rng.uniform();
      q(i) = rng.uniform();
    }
    p /= p.sum();
    q /= q.sum();
    double l1 = (p - q).cwiseAbs().sum();
    CHECK(trace_distance(p.cast<cplx>().asDiagonal().toDenseMatrix(),
                         q.cast<cplx>().asDiagonal().toDenseMatrix()) ==
          doctest::Approx(l1).epsilon(1e-12));
  }
}

TEST_CASE("entropy and cqmi") {
  Rng rng(43);
  for (int k = 0; k < 10; ++k) {
    auto r = random_density({2, 3}, {"A", "B"}, 1 + k % 6, rng);
    CHECK(von_neumann_entropy(r) == doctest::Approx(oracle_entropy(r.matrix())).epsilon(1e-10));
  }
  auto prod = tensor(tensor(random_density({2}, {"A"}, 2, rng), random_density({2}, {"B"}, 2, rng)),
                     random_density({2}, {"C"}, 2, rng));
  CHECK(std::abs(cqmi(prod, {"A"}, {"B"}, {"C"})) < 1e-10);
  auto phis = tensor(max_entangled(2), random_density({2}, {"C"}, 2, rng));
  CHECK(cqmi(phis, {"A"}, {"B"}, {"C"}) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(cqmi(ghz3(), {"A"}, {"B"}, {"C"}) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(mutual_information(max_entangled(2), {"A"}, {"B"}) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK_THROWS_AS(cqmi(ghz3(), {"A"}, {"A"}, {"C"}), InputError);

  // strong subadditivity
  double worst = 1.0;
  for (int k = 0; k < 500; ++k) {
    auto s = random_density({2, 2, 2}, {"A", "B", "C"}, 1 + k % 8, rng);
    worst = std::min(worst, cqmi(s, {"A"}, {"B"}, {"C"}));
  }
  CHECK(worst >= -1e-7);
}

TEST_CASE("renyi relative entropies") {
  Rng rng(44);
  auto r = random_density({3}, {"A"}, 3, rng).matrix();
  CHECK(std::abs(renyi_relative_entropy(r, r, 0.5).value) < 1e-10);
  CHECK(std::abs(sandwiched_renyi(r, r, 1.7).value) < 1e-10);

  // commuting pair vs classical formula
  RVector p(3), q(3);
  p << 0.2, 0.5, 0.3;
  q << 0.4, 0.4, 0.2;
  CMatrix dp = p.cast<cplx>().asDiagonal(), dq = q.cast<cplx>().asDiagonal();
  for (double a : {0.3, 0.5, 1.5, 2.0}) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += std::pow(p(i), a) * std::pow(q(i), 1.0 - a);
    double classical = std::log2(s) / (a - 1.0);
    CHECK(renyi_relative_entropy(dp, dq, a).value == doctest::Approx(classical).epsilon(1e-10));
    CHECK(sandwiched_renyi(dp, dq, a).value == doctest::Approx(classical).epsilon(1e-10));
  }

  auto z0 = diag({1, 0});
  auto zz = diag({0.5, 0.5});
  auto inf = renyi_relative_entropy(zz, z0, 2.0);
  CHECK(inf.infinite);
  CHECK(sandwiched_renyi(zz, z0, 2.0).infinite);
  CHECK_THROWS_AS(renyi_relative_entropy(r, r, 1.0), InputError);
  CHECK_THROWS_AS(sandwiched_renyi(r, r, -0.5), InputError);

  for (int k = 0; k < 10; ++k) {
    auto x = random_density({2, 2}, {"A", "B"}, 4, rng).matrix();
    auto y = random_density({2, 2}, {"A", "B"}, 4, rng).matrix();
    double d = oracle_relative_entropy(x, y);
    CHECK(relative_entropy(x, y).value == doctest::Approx(d).epsilon(1e-8));
    double lo = renyi_relative_entropy(x, y, 1.0 - 1e-4).value;
    double hi = renyi_relative_entropy(x, y, 1.0 + 1e-4).value;
    CHECK(lo <= d + 1e-9);
    CHECK(hi >= d - 1e-9);
    CHECK(std::abs(lo - d) < 1e-3);
    CHECK(std::abs(hi - d) < 1e-3);
    CHECK(std::abs(sandwiched_renyi(x, y, 1.0 + 1e-4).value - d) < 1e-3);
    CHECK(std::abs(sandwiched_renyi(x, y, 1.0 - 1e-4).value - d) < 1e-3);
    // alpha = 1/2 sandwiched is -log F
    CHECK(sandwiched_renyi(x, y, 0.5).value == doctest::Approx(-std::log2(fidelity(x, y))).epsilon(1e-9));
  }
}

TEST_CASE("sandwiched renyi is monotone in alpha") {
  Rng rng(45);
  const double grid[] = {0.3, 0.5, 0.7, 0.9, 1.1, 1.5, 2.0};
  for (int k = 0; k < 50; ++k) {
    auto x = random_density({2, 2}, {"A", "B"}, 1 + k % 4, rng).matrix();
    auto y = random_density({2, 2}, {"A", "B"}, 4, rng).matrix();
    double prev = -1e300;
    for (double a : grid) {
      double v = sandwiched_renyi(x, y, a).value;
      CHECK(v >= prev - 1e-7);
      prev = v;
    }
  }
}

TEST_CASE("conditional renyi entropy") {
  Rng rng(46);
  auto ra = random_density({2}, {"A"}, 2, rng);
  auto prod = tensor(ra, random_density({2}, {"B"}, 2, rng));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(ra.matrix());
  for (double a : {0.5, 2.0}) {
    double s = 0.0;
    for (double l : es.eigenvalues()) s += std::pow(l, a);
    double h_a = std::log2(s) / (1.0 - a);
    CHECK(conditional_renyi_entropy(prod, {"A"}, {"B"}, a).value == doctest::Approx(h_a).epsilon(1e-9));
  }
  CHECK(conditional_renyi_entropy(max_entangled(2), {"A"}, {"B"}, 2.0).value ==
        doctest::Approx(-1.0).epsilon(1e-10));
  for (int k = 0; k < 20; ++k) {
    auto cq = random_cq(2, 2, rng);
    CHECK(conditional_renyi_entropy(cq, {"X"}, {"B"}, 0.5).value >= -1e-7);
  }
}

TEST_CASE("renyi cqmi") {
  Rng rng(47);
  auto prod = tensor(tensor(random_density({2}, {"A"}, 2, rng), random_density({2}, {"B"}, 2, rng)),
                     random_density({2}, {"C"}, 2, rng));
  for (double a : {0.5, 0.8, 1.5, 2.0}) CHECK(std::abs(renyi_cqmi(prod, {"A"}, {"B"}, {"C"}, a).value) < 1e-8);

  for (int k = 0; k < 10; ++k) {
    auto s = random_density({2, 2, 2}, {"A", "B", "C"}, 8, rng);
    double i = cqmi(s, {"A"}, {"B"}, {"C"});
    CHECK(std::abs(renyi_cqmi(s, {"A"}, {"B"}, {"C"}, 1.0 - 1e-4).value - i) < 1e-3);
    CHECK(std::abs(renyi_cqmi(s, {"A"}, {"B"}, {"C"}, 1.0 + 1e-4).value - i) < 1e-3);
  }
  for (int k = 0; k < 200; ++k) {
    auto s = random_density({2, 2, 2}, {"A", "B", "C"}, 1 + k % 8, rng);
    CHECK(renyi_cqmi(s, {"A"}, {"B"}, {"C"}, 0.5).value <= cqmi(s, {"A"}, {"B"}, {"C"}) + 1e-7);
  }
  CHECK_THROWS_AS(renyi_cqmi(prod, {"A"}, {"B"}, {"C"}, 1.0), InputError);
}

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
  double e = 0.11;
  double direct = -e * std::log2(e) - (1 - e) * std::log2(1 - e);
  CHECK(binary_entropy(e) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(binary_entropy(e) == doctest::Approx(0.4999).epsilon(1e-3));
  CHECK_THROWS_AS(binary_entropy(1.5), InputError);
}

TEST_CASE("fidelity inequalities") {
  Rng rng(48);
  for (int k = 0; k < 100; ++k) {
    auto ch = random_channel({2}, {2}, 1 + k % 4, rng);
    auto x = random_density({2, 2}, {"A", "B"}, 1 + k % 4, rng);
    auto y = random_density({2, 2}, {"A", "B"}, 4, rng);
    double before = fidelity(x.matrix(), y.matrix());
    double after = fidelity(apply(ch, x, {"A"}).matrix(), apply(ch, y, {"A"}).matrix());
    CHECK(after >= before - 1e-8);

    double f = before, td = trace_distance(x.matrix(), y.matrix()) / 2.0;
    CHECK(1.0 - std::sqrt(f) <= td + 1e-8);
    CHECK(td <= std::sqrt(1.0 - f) + 1e-8);
  }
}

TEST_CASE("joint concavity of root fidelity") {
  Rng rng(49);
  for (int k = 0; k < 30; ++k) {
    RVector p(3);
    for (int z = 0; z < 3; ++z) p(z) = rng.uniform() + 0.05;
    p /= p.sum();
    CMatrix tau = CMatrix::Zero(2, 2), omega = CMatrix::Zero(2, 2);
    CMatrix flag_t = CMatrix::Zero(6, 6), flag_w = CMatrix::Zero(6, 6);
    double avg = 0.0;
    for (int z = 0; z < 3; ++z) {
      CMatrix t = random_density({2}, {"A"}, 2, rng).matrix();
      CMatrix w = random_density({2}, {"A"}, 2, rng).matrix();
      tau += p(z) * t;
      omega += p(z) * w;
      flag_t.block(2 * z, 2 * z, 2, 2) = p(z) * t;
      flag_w.block(2 * z, 2 * z, 2, 2) = p(z) * w;
      avg += p(z) * root_fidelity(t, w);
    }
    CHECK(root_fidelity(tau, omega) >= avg - 1e-8);
    // orthogonal flags make it an equality
    CHECK(root_fidelity(flag_t, flag_w) == doctest::Approx(avg).epsilon(1e-9));
  }
}
