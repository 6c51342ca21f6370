#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "tivstat/error.hpp"
#include "tivstat/estimators.hpp"
#include "tivstat/rmt.hpp"
#include "tivstat/spectra.hpp"
#include "tivstat/theory.hpp"

using namespace tivstat;

namespace {

const BilliardGeometry kCavityMinus{0.18285, 2.023, PerimeterSign::Minus, 0.0};
const BilliardGeometry kCavityPlus{0.18285, 2.023, PerimeterSign::Plus, 0.0};

// Direct evaluation of A pi nu^2 / c^2 -+ P nu / (2c) with nu in Hz.
double weyl_direct(double area, double perimeter, double sign, double nu_ghz) {
  const double c = 299792458.0;
  const double nu = nu_ghz * 1e9;
  return area * std::numbers::pi * nu * nu / (c * c) + sign * perimeter * nu / (2.0 * c);
}

std::vector<double> lattice(std::size_t n, double start = 0.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = start + static_cast<double>(i);
  return v;
}

}  // namespace

TEST_SUITE_BEGIN("spectra");

TEST_CASE("level sequence invariants") {
  CHECK_THROWS_AS(LevelSequence({1.0, 1.0}, LevelUnit::FrequencyGHz), DataError);
  CHECK_THROWS_AS(LevelSequence({2.0, 1.0}, LevelUnit::FrequencyGHz), DataError);
  CHECK_THROWS_AS(LevelSequence({1.0}, LevelUnit::FrequencyGHz), DataError);
  CHECK_THROWS_AS(LevelSequence({1.0, NAN}, LevelUnit::FrequencyGHz), DataError);
  CHECK_NOTHROW(LevelSequence({1.0, 2.0}, LevelUnit::Unfolded));
}

TEST_CASE("Weyl count of the bowtie billiard") {
  CHECK(weyl_count(kCavityMinus, 0.0) == 0.0);
  CHECK_THROWS_AS(weyl_count(kCavityMinus, -1.0), DomainError);

  const double n12 = weyl_count(kCavityMinus, 12.0);
  CHECK(n12 == doctest::Approx(weyl_direct(0.18285, 2.023, -1.0, 12.0)).epsilon(1e-13));
  // 879.89 with c = 299792458 m/s; the rounded c = 2.998e8 gives 879.84.
  CHECK(n12 == doctest::Approx(879.89).epsilon(1e-5));

  const double band_minus = weyl_count(kCavityMinus, 8.0) - weyl_count(kCavityMinus, 6.5);
  const double band_plus = weyl_count(kCavityPlus, 8.0) - weyl_count(kCavityPlus, 6.5);
  CHECK(band_minus ==
        doctest::Approx(weyl_direct(0.18285, 2.023, -1, 8.0) - weyl_direct(0.18285, 2.023, -1, 6.5)).epsilon(1e-12));
  CHECK(band_minus == doctest::Approx(133.95).epsilon(1e-4));
  CHECK(band_plus == doctest::Approx(144.08).epsilon(1e-4));
}

TEST_CASE("Weyl inverse composes to the identity") {
  for (double count : {0.5, 1.0, 10.0, 133.0, 900.0}) {
    CHECK(weyl_count(kCavityMinus, weyl_inverse(kCavityMinus, count)) == doctest::Approx(count).epsilon(1e-12));
    CHECK(weyl_count(kCavityPlus, weyl_inverse(kCavityPlus, count)) == doctest::Approx(count).epsilon(1e-12));
  }
  BilliardGeometry g = kCavityMinus;
  g.constant_offset = 0.2;
  CHECK(weyl_count(g, weyl_inverse(g, 50.0)) == doctest::Approx(50.0));
}

TEST_CASE("calibrated offset puts the lowest level at one half") {
  BilliardGeometry g = kCavityMinus;
  g.constant_offset = calibrated_weyl_offset(kCavityMinus, 6.5);
  CHECK(weyl_count(g, 6.5) == doctest::Approx(0.5));
}

TEST_CASE("Weyl unfolding of levels at the inverse staircase") {
  std::vector<double> nu;
  for (int k = 1; k <= 100; ++k) nu.push_back(weyl_inverse(kCavityMinus, k));
  const auto u = unfold_weyl(LevelSequence(nu, LevelUnit::FrequencyGHz), kCavityMinus);
  REQUIRE(u.size() == 100);
  for (std::size_t i = 1; i < u.size(); ++i) CHECK(u.values()[i] - u.values()[i - 1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(u.provenance().kind == UnfoldingKind::Weyl);
  CHECK_THROWS_AS(unfold_weyl(LevelSequence(nu, LevelUnit::Unfolded), kCavityMinus), DomainError);
}

TEST_CASE("Weyl unfolding of 110 levels in 6.5-8 GHz") {
  std::vector<double> nu;
  for (int i = 0; i < 110; ++i) nu.push_back(6.5 + 1.5 * i / 109.0);
  const auto u = unfold_weyl(LevelSequence(nu, LevelUnit::FrequencyGHz), kCavityMinus);
  // 133.95 predicted levels over 109 gaps.
  CHECK(u.mean_spacing() == doctest::Approx((weyl_count(kCavityMinus, 8.0) - weyl_count(kCavityMinus, 6.5)) / 109.0));
  CHECK(u.mean_spacing() == doctest::Approx(1.22).epsilon(0.01));
}

TEST_CASE("polynomial unfolding of an equally spaced sequence") {
  std::vector<double> e;
  for (int i = 0; i < 50; ++i) e.push_back(3.0 + 0.37 * i);
  const auto u = unfold_polynomial(LevelSequence(e, LevelUnit::RawEigenvalue), 3);
  for (std::size_t i = 1; i < u.size(); ++i) CHECK(u.values()[i] - u.values()[i - 1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(u.values()[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK_THROWS_AS(unfold_polynomial(LevelSequence(e, LevelUnit::RawEigenvalue), 2), DomainError);
  CHECK_THROWS_AS(unfold_polynomial(LevelSequence({1.0, 2.0, 3.0}, LevelUnit::RawEigenvalue), 3), DomainError);
}

TEST_CASE("polynomial unfolding of GOE bulk reproduces the number variance") {
  std::vector<UnfoldedSpectrum> spectra;
  for (std::uint64_t r = 0; r < 30; ++r) {
    auto rng = RandomStream::substream(123, r);
    const auto h = sample_crossover_matrix({0.0, 500}, rng);
    const auto bulk = bulk_select(hermitian_eigenvalues(h), 0.6);
    spectra.push_back(unfold_polynomial(LevelSequence(bulk, LevelUnit::RawEigenvalue), 7));
  }
  const std::vector<double> l{1.0};
  const auto s2 = number_variance(spectra, l);
  REQUIRE(s2.points.size() == 1);
  const double theory = sigma2_theory(1.0, 0.0);
  CHECK(std::abs(s2.points[0].y - theory) < 3.0 * *s2.points[0].y_err);
}

TEST_CASE("semicircle unfolding yields unit mean spacing in the bulk") {
  auto rng = RandomStream::substream(5, 0);
  const std::size_t n = 400;
  const auto h = sample_crossover_matrix({0.0, n}, rng);
  const auto bulk = bulk_select(hermitian_eigenvalues(h), 0.6);
  const auto u = unfold_semicircle(LevelSequence(bulk, LevelUnit::RawEigenvalue), n, 2.0 * std::sqrt(double(n)));
  CHECK(u.mean_spacing() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("decimation") {
  const UnfoldedSpectrum full(lattice(1000), {UnfoldingKind::Polynomial, 1.0}, 1000);

  SUBCASE("phi = 1 is the identity") {
    RandomStream rng(1);
    const auto same = decimate(full, 1.0, rng);
    REQUIRE(same.size() == full.size());
    for (std::size_t i = 0; i < full.size(); ++i) CHECK(same.values()[i] == full.values()[i]);
  }
  SUBCASE("phi outside (0, 1] is refused") {
    RandomStream rng(1);
    CHECK_THROWS_AS(decimate(full, 0.0, rng), DomainError);
    CHECK_THROWS_AS(decimate(full, 1.2, rng), DomainError);
  }
  SUBCASE("too few survivors") {
    RandomStream rng(1);
    const UnfoldedSpectrum tiny({0.0, 1.0, 2.0}, {UnfoldingKind::Polynomial, 1.0}, 3);
    CHECK_THROWS_AS(decimate(tiny, 1e-9, rng), DataError);
  }
  SUBCASE("survivor count lies in the binomial 99% interval") {
    const auto [lo, hi] = oracle::binomial_interval(10000, 0.8, 0.99);
    // Normal approximation: 8000 -+ 2.576 * 40.
    CHECK(std::abs(lo - 7897) <= 2);
    CHECK(std::abs(hi - 8103) <= 2);
    const UnfoldedSpectrum big(lattice(10000), {UnfoldingKind::Polynomial, 1.0}, 10000);
    int inside = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      RandomStream rng(seed);
      const auto d = decimate(big, 0.8, rng);
      const auto k = static_cast<long>(d.size());
      if (k >= lo && k <= hi) ++inside;
      CHECK(d.provenance().kind == UnfoldingKind::Decimated);
      CHECK(d.source_count() == 10000);
    }
    // P(all 20 outside a 99% interval) is negligible; P(>= 18 inside) > 0.98.
    CHECK(inside >= 18);
  }
  SUBCASE("thinning a Poisson spectrum leaves it Poisson") {
    const auto levels = oracle::poisson_levels(200000, 99);
    const UnfoldedSpectrum poisson(levels, {UnfoldingKind::Polynomial, 1.0}, levels.size());
    RandomStream rng(3);
    const auto thinned = decimate(poisson, 0.6, rng);
    const auto nn = kth_neighbor_spacings(thinned, 1);
    double m = 0.0;
    for (double s : nn.spacings) m += s;
    m /= static_cast<double>(nn.spacings.size());
    CHECK(std::abs(m - 1.0) < 3.0 / std::sqrt(static_cast<double>(nn.spacings.size())));
    const auto hist = spacing_histogram(nn, 0.1);
    double l1 = 0.0;
    for (const auto& p : hist.points) {
      l1 += std::abs(p.y - (std::exp(-(p.x - 0.05)) - std::exp(-(p.x + 0.05))) / 0.1) * 0.1;
    }
    CHECK(l1 < 0.05);
  }
  SUBCASE("same stream state gives the same output") {
    RandomStream a(42), b(42);
    const auto da = decimate(full, 0.7, a);
    const auto db = decimate(full, 0.7, b);
    REQUIRE(da.size() == db.size());
    for (std::size_t i = 0; i < da.size(); ++i) CHECK(da.values()[i] == db.values()[i]);
  }
}

TEST_CASE("cross-correlation coefficient") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;

  SUBCASE("reciprocal trace") {
    std::vector<std::complex<double>> s(500);
    for (auto& v : s) v = {0.3 + g(rng), g(rng)};
    CHECK(cross_correlation_coefficient(s, s) == doctest::Approx(1.0));
  }
  SUBCASE("independent white noise") {
    std::vector<std::complex<double>> a(10000), b(10000);
    for (auto& v : a) v = {g(rng), g(rng)};
    for (auto& v : b) v = {g(rng), g(rng)};
    CHECK(std::abs(cross_correlation_coefficient(a, b)) < 0.05);
  }
  SUBCASE("conjugate channel against brute-force summation") {
    std::vector<std::complex<double>> a(100), b(100);
    for (auto& v : a) v = {1.5 + g(rng), -0.7 + 0.5 * g(rng)};
    for (std::size_t i = 0; i < a.size(); ++i) b[i] = std::conj(a[i]);
    std::complex<double> m = 0.0;
    for (auto v : a) m += v;
    m /= 100.0;
    double num = 0.0, den = 0.0;
    for (auto v : a) {
      const auto f = v - m;
      num += (f * f).real();
      den += std::norm(f);
    }
    CHECK(cross_correlation_coefficient(a, b) == doctest::Approx(num / den).epsilon(1e-12));
  }
  SUBCASE("constant channel is undefined") {
    std::vector<std::complex<double>> a(50, {1.0, 0.0}), b(50);
    for (auto& v : b) v = {g(rng), g(rng)};
    CHECK_THROWS_AS(cross_correlation_coefficient(a, b), NumericalError);
  }
}

TEST_CASE("windowed cross-correlation") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  SParameterTrace trace;
  for (int i = 0; i < 1050; ++i) {
    trace.frequency_ghz.push_back(6.005 + 0.01 * i);
    const std::complex<double> s{g(rng), g(rng)};
    trace.s12.push_back(s);
    trace.s21.push_back(0.8 * s + 0.6 * std::complex<double>{g(rng), g(rng)});
  }
  const auto windows = cross_correlation(trace, 1.0);
  // The trailing 50 points still make a window of their own.
  REQUIRE(windows.size() == 11);
  for (const auto& w : windows) {
    CHECK(w.coefficient >= -1.0);
    CHECK(w.coefficient <= 1.0);
  }
  CHECK(windows[0].points == 100);
  CHECK(windows[0].start_ghz == doctest::Approx(6.005));
  CHECK(windows[10].points == 50);

  SParameterTrace short_tail = trace;
  short_tail.frequency_ghz.resize(1010);
  short_tail.s12.resize(1010);
  short_tail.s21.resize(1010);
  CHECK(cross_correlation(short_tail, 1.0).size() == 10);

  CHECK_THROWS_AS(cross_correlation(trace, 0.1), DomainError);
  CHECK_THROWS_AS(cross_correlation(trace, -1.0), DomainError);
}

TEST_SUITE_END();
