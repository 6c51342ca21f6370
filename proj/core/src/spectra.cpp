#include "tivstat/spectra.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tivstat/error.hpp"
#include "tivstat/numeric.hpp"

namespace tivstat {

namespace {

void require_strictly_increasing(std::span<const double> v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      std::ostringstream os;
      os << what << ": non-finite value at index " << i;
      throw DataError(os.str());
    }
    if (i > 0 && !(v[i] > v[i - 1])) {
      std::ostringstream os;
      os << what << ": values not strictly increasing at index " << i << " (" << v[i - 1] << " >= " << v[i]
         << ")";
      throw DataError(os.str());
    }
  }
}

// Coefficients (a, b) of count = a nu^2 + b nu + const with nu in GHz.
struct WeylCoefficients {
  double quadratic;
  double linear;
};

WeylCoefficients weyl_coefficients(const BilliardGeometry& g) {
  const double hz = 1e9;
  const double sign = g.perimeter_sign == PerimeterSign::Minus ? -1.0 : 1.0;
  return {g.area * std::numbers::pi / (kSpeedOfLight * kSpeedOfLight) * hz * hz,
          sign * g.perimeter / (2.0 * kSpeedOfLight) * hz};
}

}  // namespace

LevelSequence::LevelSequence(std::vector<double> values, LevelUnit unit) : values_(std::move(values)), unit_(unit) {
  if (values_.size() < 2) throw DataError("level sequence needs at least two levels");
  require_strictly_increasing(values_, "level sequence");
}

void BilliardGeometry::validate() const {
  if (!(area > 0.0) || !(perimeter > 0.0)) throw DomainError("billiard area and perimeter must be positive");
}

std::string Provenance::describe() const {
  switch (kind) {
    case UnfoldingKind::Weyl:
      return "weyl";
    case UnfoldingKind::Polynomial:
      return "polynomial";
    case UnfoldingKind::Semicircle:
      return "semicircle";
    case UnfoldingKind::Decimated: {
      std::ostringstream os;
      os << "decimated(" << phi << ")";
      return os.str();
    }
  }
  return "unknown";
}

UnfoldedSpectrum::UnfoldedSpectrum(std::vector<double> values, Provenance provenance, std::size_t source_count)
    : values_(std::move(values)), provenance_(provenance), source_count_(source_count) {
  if (values_.size() < 2) throw DataError("unfolded spectrum needs at least two levels");
  require_strictly_increasing(values_, "unfolded spectrum");
}

double UnfoldedSpectrum::mean_spacing() const {
  return (values_.back() - values_.front()) / static_cast<double>(values_.size() - 1);
}

void SParameterTrace::validate() const {
  if (frequency_ghz.size() != s12.size() || frequency_ghz.size() != s21.size()) {
    throw DataError("S-parameter trace: channel lengths differ from the frequency grid");
  }
  require_strictly_increasing(frequency_ghz, "S-parameter frequency grid");
}

double weyl_count(const BilliardGeometry& geometry, double nu_ghz) {
  geometry.validate();
  if (nu_ghz < 0.0 || !std::isfinite(nu_ghz)) throw DomainError("weyl_count: frequency must be non-negative");
  const auto [a, b] = weyl_coefficients(geometry);
  return a * nu_ghz * nu_ghz + b * nu_ghz + geometry.constant_offset;
}

double weyl_inverse(const BilliardGeometry& geometry, double count) {
  geometry.validate();
  const auto [a, b] = weyl_coefficients(geometry);
  const double c = geometry.constant_offset - count;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) throw DomainError("weyl_inverse: count below the minimum of the Weyl curve");
  // Larger root, written to avoid cancellation.
  const double sq = std::sqrt(disc);
  if (b > 0.0) return (2.0 * c) / (-b - sq);
  return (-b + sq) / (2.0 * a);
}

double calibrated_weyl_offset(const BilliardGeometry& geometry, double lowest_level_ghz) {
  BilliardGeometry g = geometry;
  g.constant_offset = 0.0;
  return 0.5 - weyl_count(g, lowest_level_ghz);
}

UnfoldedSpectrum unfold_weyl(const LevelSequence& levels, const BilliardGeometry& geometry) {
  if (levels.unit() != LevelUnit::FrequencyGHz) throw DomainError("unfold_weyl expects levels in GHz");
  std::vector<double> out;
  out.reserve(levels.size());
  for (double nu : levels.values()) out.push_back(weyl_count(geometry, nu));
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] > out[i - 1])) {
      throw InternalError("unfold_weyl: unfolded levels not increasing (levels below the Weyl turning point?)");
    }
  }
  return UnfoldedSpectrum(std::move(out), {UnfoldingKind::Weyl, 1.0}, levels.size());
}

UnfoldedSpectrum unfold_polynomial(const LevelSequence& levels, int degree) {
  if (degree < 3 || degree > 15) throw DomainError("unfold_polynomial: degree must lie in [3, 15]");
  const auto v = levels.values();
  const auto n = static_cast<Eigen::Index>(v.size());
  if (n <= 2 * degree) throw DomainError("unfold_polynomial: need more than 2*degree levels");

  // Legendre basis on the level range mapped to [-1, 1].
  const double lo = v.front();
  const double hi = v.back();
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  if (!(half > 0.0)) throw NumericalError("unfold_polynomial: zero level range");

  Eigen::MatrixXd design(n, degree + 1);
  Eigen::VectorXd staircase(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = (v[static_cast<std::size_t>(i)] - mid) / half;
    design(i, 0) = 1.0;
    design(i, 1) = x;
    for (int k = 2; k <= degree; ++k) {
      design(i, k) = ((2.0 * k - 1.0) * x * design(i, k - 1) - (k - 1.0) * design(i, k - 2)) / k;
    }
    staircase(i) = static_cast<double>(i) + 0.5;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-12);
  if (qr.rank() < degree + 1) {
    std::ostringstream os;
    os << "unfold_polynomial: rank-deficient fit (rank " << qr.rank() << " of " << degree + 1
       << "); levels span [" << lo << ", " << hi << "]";
    throw NumericalError(os.str());
  }
  const Eigen::VectorXd coeffs = qr.solve(staircase);
  const Eigen::VectorXd fitted = design * coeffs;

  std::vector<double> out(fitted.data(), fitted.data() + n);
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] > out[i - 1])) {
      std::ostringstream os;
      os << "unfold_polynomial: fitted staircase not increasing at level " << i << " (degree " << degree << ")";
      throw NumericalError(os.str());
    }
  }
  return UnfoldedSpectrum(std::move(out), {UnfoldingKind::Polynomial, 1.0}, levels.size());
}

UnfoldedSpectrum unfold_semicircle(const LevelSequence& levels, std::size_t matrix_dim, double radius) {
  if (!(radius > 0.0)) throw DomainError("unfold_semicircle: radius must be positive");
  std::vector<double> out;
  out.reserve(levels.size());
  const double n = static_cast<double>(matrix_dim);
  for (double e : levels.values()) {
    const double x = std::clamp(e / radius, -1.0, 1.0);
    out.push_back(n * (0.5 + (x * std::sqrt(1.0 - x * x) + std::asin(x)) / std::numbers::pi));
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] > out[i - 1])) throw NumericalError("unfold_semicircle: levels outside the semicircle support");
  }
  return UnfoldedSpectrum(std::move(out), {UnfoldingKind::Semicircle, 1.0}, levels.size());
}

UnfoldedSpectrum decimate(const UnfoldedSpectrum& spectrum, double phi, RandomStream& rng) {
  if (!(phi > 0.0) || phi > 1.0) throw DomainError("decimate: phi must lie in (0, 1]");
  std::vector<double> kept;
  kept.reserve(static_cast<std::size_t>(phi * static_cast<double>(spectrum.size())) + 16);
  for (double e : spectrum.values()) {
    // A draw is consumed per level even for phi == 1 so that the stream
    // position does not depend on phi.
    const bool keep = rng.bernoulli(phi);
    if (keep) kept.push_back(e * phi);
  }
  if (kept.size() < 2) throw DataError("decimate: fewer than two levels survived");
  if (phi == 1.0) return spectrum;
  return UnfoldedSpectrum(std::move(kept), {UnfoldingKind::Decimated, phi}, spectrum.source_count());
}

double cross_correlation_coefficient(std::span<const std::complex<double>> s12,
                                     std::span<const std::complex<double>> s21) {
  if (s12.size() != s21.size() || s12.empty()) throw DataError("cross_correlation: channel length mismatch");
  const double n = static_cast<double>(s12.size());
  CompensatedSum m12r, m12i, m21r, m21i;
  for (std::size_t i = 0; i < s12.size(); ++i) {
    m12r += s12[i].real();
    m12i += s12[i].imag();
    m21r += s21[i].real();
    m21i += s21[i].imag();
  }
  const std::complex<double> mean12(m12r.value() / n, m12i.value() / n);
  const std::complex<double> mean21(m21r.value() / n, m21i.value() / n);

  CompensatedSum cross, var12, var21;
  for (std::size_t i = 0; i < s12.size(); ++i) {
    const auto f12 = s12[i] - mean12;
    const auto f21 = s21[i] - mean21;
    cross += (f12 * std::conj(f21)).real();
    var12 += std::norm(f12);
    var21 += std::norm(f21);
  }
  const double denom = std::sqrt(var12.value() * var21.value());
  if (!(denom > 0.0)) throw NumericalError("cross_correlation: zero variance in a channel, coefficient undefined");
  return std::clamp(cross.value() / denom, -1.0, 1.0);
}

std::vector<WindowCoefficient> cross_correlation(const SParameterTrace& trace, double window_ghz) {
  trace.validate();
  if (!(window_ghz > 0.0)) throw DomainError("cross_correlation: window must be positive");
  const auto& f = trace.frequency_ghz;
  const double f0 = f.front();

  std::vector<WindowCoefficient> out;
  std::size_t begin = 0;
  for (std::size_t k = 0; begin < f.size(); ++k) {
    const double start = f0 + static_cast<double>(k) * window_ghz;
    const double stop = start + window_ghz;
    std::size_t end = begin;
    while (end < f.size() && f[end] < stop) ++end;
    const std::size_t count = end - begin;
    if (k == 0 && count < kMinWindowPoints) {
      std::ostringstream os;
      os << "cross_correlation: window of " << window_ghz << " GHz covers only " << count << " grid points (need "
         << kMinWindowPoints << ")";
      throw DomainError(os.str());
    }
    if (count >= kMinWindowPoints) {
      const std::span<const std::complex<double>> a(trace.s12.data() + begin, count);
      const std::span<const std::complex<double>> b(trace.s21.data() + begin, count);
      out.push_back({start, stop, count, cross_correlation_coefficient(a, b)});
    }
    begin = end;
  }
  return out;
}

}  // namespace tivstat
