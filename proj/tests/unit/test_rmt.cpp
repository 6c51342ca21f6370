#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "tivstat/error.hpp"
#include "tivstat/numeric.hpp"
#include "tivstat/rmt.hpp"

using namespace tivstat;

namespace {

std::vector<double> oracle_embedding(const HermitianMatrix& h) {
  const std::size_t n = h.dim(), m = 2 * n;
  std::vector<double> a(m * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i * m + j] = a[(i + n) * m + j + n] = h.re(i, j);
      a[i * m + j + n] = -h.im(i, j);
      a[(i + n) * m + j] = h.im(i, j);
    }
  }
  return oracle::jacobi_eigenvalues(a, m);
}

}  // namespace

TEST_SUITE_BEGIN("rmt");

TEST_CASE("coupling and parameter validation") {
  CHECK(CrossoverParams{0.35, 700}.lambda() == doctest::Approx(std::numbers::pi * 0.35 / std::sqrt(700.0)));
  CHECK_THROWS_AS(CrossoverParams({-0.1, 10}).validate(), DomainError);
  CHECK_THROWS_AS(CrossoverParams({0.1, 1}).validate(), DomainError);
  CHECK_NOTHROW(CrossoverParams({5.0, 10}).validate());
}

TEST_CASE("sampled matrices") {
  SUBCASE("xi = 0 is real symmetric") {
    RandomStream rng(1);
    const auto h = sample_crossover_matrix({0.0, 40}, rng);
    CHECK(h.is_hermitian());
    for (double v : h.imag_part()) CHECK(v == 0.0);
  }
  SUBCASE("xi > 0 is Hermitian with an antisymmetric imaginary part") {
    RandomStream rng(2);
    const auto h = sample_crossover_matrix({0.8, 40}, rng);
    CHECK(h.is_hermitian());
    double nonzero = 0.0;
    for (double v : h.imag_part()) nonzero += std::abs(v);
    CHECK(nonzero > 0.0);
  }
  SUBCASE("element variances") {
    const std::size_t n = 400;
    RandomStream rng(3);
    const CrossoverParams p{1.0, n};
    const auto h = sample_crossover_matrix(p, rng);
    std::vector<double> diag, off_re, off_im;
    for (std::size_t i = 0; i < n; ++i) {
      diag.push_back(h.re(i, i));
      for (std::size_t j = i + 1; j < n; ++j) {
        off_re.push_back(h.re(i, j));
        off_im.push_back(h.im(i, j));
      }
    }
    // Relative standard error of a sample variance is sqrt(2 / count).
    CHECK(sample_variance(diag) == doctest::Approx(2.0).epsilon(4.0 * std::sqrt(2.0 / n)));
    CHECK(sample_variance(off_re) == doctest::Approx(1.0).epsilon(4.0 * std::sqrt(2.0 / off_re.size())));
    CHECK(sample_variance(off_im) ==
          doctest::Approx(p.lambda() * p.lambda()).epsilon(4.0 * std::sqrt(2.0 / off_im.size())));
  }
  SUBCASE("construction checks") {
    HermitianMatrix h(2);
    CHECK_THROWS_AS(h.set(0, 0, 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(HermitianMatrix(2, {1, 2, 3, 4}, {0, 0, 0, 0}), DomainError);
    CHECK_THROWS_AS(HermitianMatrix(2, {1, 2}, {0, 0}), DomainError);
  }
}

TEST_CASE("small matrices with known spectra") {
  HermitianMatrix one(2);
  one.set(0, 0, 3.5, 0.0);
  one.set(1, 1, 3.5, 0.0);
  auto ev = hermitian_eigenvalues(one);
  CHECK(ev[0] == doctest::Approx(3.5));
  CHECK(ev[1] == doctest::Approx(3.5));

  // [[0, i l], [-i l, 0]] has eigenvalues -l and l.
  HermitianMatrix pauli(2);
  pauli.set(0, 1, 0.0, 1.7);
  ev = hermitian_eigenvalues(pauli);
  CHECK(ev[0] == doctest::Approx(-1.7));
  CHECK(ev[1] == doctest::Approx(1.7));
}

TEST_CASE("eigenvalues agree with a Jacobi oracle") {
  RandomStream rng(17);
  const auto h = sample_crossover_matrix({0.6, 6}, rng);
  const auto lib = embedding_eigenvalues(h);
  const auto ref = oracle_embedding(h);
  REQUIRE(lib.size() == 12);
  for (std::size_t i = 0; i < lib.size(); ++i) CHECK(lib[i] == doctest::Approx(ref[i]).epsilon(1e-10));
  const auto paired = hermitian_eigenvalues(h);
  REQUIRE(paired.size() == 6);
  double trace = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    trace += h.re(i, i);
    sum += paired[i];
    CHECK(paired[i] == doctest::Approx(ref[2 * i]).epsilon(1e-10));
  }
  CHECK(sum == doctest::Approx(trace).epsilon(1e-12));
}

TEST_CASE("non-finite entries are refused") {
  HermitianMatrix h(2);
  h.set(0, 1, NAN, 0.0);
  CHECK_THROWS_AS(embedding_eigenvalues(h), DomainError);
}

TEST_CASE("bulk selection") {
  std::vector<double> ten{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto mid = bulk_select(ten, 0.5);
  CHECK(mid == std::vector<double>{2, 3, 4, 5, 6});
  std::vector<double> big(700);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = static_cast<double>(i);
  const auto bulk = bulk_select(big, 0.6);
  REQUIRE(bulk.size() == 420);
  CHECK(bulk.front() == 140.0);
  CHECK(bulk.back() == 559.0);
  CHECK(bulk_select(ten, 1.0).size() == 10);
  CHECK_THROWS_AS(bulk_select(ten, 0.0), DomainError);
  CHECK_THROWS_AS(bulk_select(ten, 1.5), DomainError);
}

TEST_CASE("ensembles") {
  EnsembleConfig c;
  c.n = 200;
  c.count = 12;
  c.xi = 0.35;
  c.phi = 1.0;
  c.seed = 77;

  SUBCASE("unit mean spacing and size") {
    for (const auto& s : generate_ensemble(c)) {
      CHECK(s.size() == 120);
      CHECK(s.mean_spacing() == doctest::Approx(1.0).epsilon(0.03));
    }
  }
  SUBCASE("semicircle unfolding") {
    c.unfolding = SimulationUnfolding::Semicircle;
    for (const auto& s : generate_ensemble(c)) CHECK(s.mean_spacing() == doctest::Approx(1.0).epsilon(0.1));
  }
  SUBCASE("output does not depend on the thread count") {
    c.phi = 0.8;
    c.threads = 1;
    const auto a = generate_ensemble(c);
    c.threads = 4;
    const auto b = generate_ensemble(c);
    REQUIRE(a.size() == b.size());
    for (std::size_t r = 0; r < a.size(); ++r) {
      REQUIRE(a[r].size() == b[r].size());
      for (std::size_t i = 0; i < a[r].size(); ++i) CHECK(a[r].values()[i] == b[r].values()[i]);
      const auto single = simulate_realization(c, r);
      CHECK(single.values().front() == a[r].values().front());
    }
  }
  SUBCASE("decimation keeps about phi of the bulk") {
    c.n = 700;
    c.count = 4;
    c.phi = 0.81;
    const auto [lo, hi] = oracle::binomial_interval(420, 0.81, 0.999);
    for (const auto& s : generate_ensemble(c)) {
      CHECK(static_cast<long>(s.size()) >= lo);
      CHECK(static_cast<long>(s.size()) <= hi);
      CHECK(s.provenance().kind == UnfoldingKind::Decimated);
    }
  }
  SUBCASE("invalid configurations") {
    c.count = 0;
    CHECK_THROWS_AS(generate_ensemble(c), DomainError);
    c.count = 2;
    c.polynomial_degree = 2;
    CHECK_THROWS_AS(generate_ensemble(c), DomainError);
  }
}

TEST_SUITE_END();
