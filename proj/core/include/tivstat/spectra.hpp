#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tivstat/random.hpp"

namespace tivstat {

enum class LevelUnit { FrequencyGHz, RawEigenvalue, Unfolded };

// Strictly increasing, finite level positions (at least two).
class LevelSequence {
 public:
  LevelSequence(std::vector<double> values, LevelUnit unit);

  std::span<const double> values() const { return values_; }
  LevelUnit unit() const { return unit_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
  LevelUnit unit_;
};

enum class PerimeterSign { Minus, Plus };

struct BilliardGeometry {
  double area = 0.0;       // m^2
  double perimeter = 0.0;  // m
  PerimeterSign perimeter_sign = PerimeterSign::Minus;
  double constant_offset = 0.0;

  void validate() const;
};

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

enum class UnfoldingKind { Weyl, Polynomial, Semicircle, Decimated };

struct Provenance {
  UnfoldingKind kind = UnfoldingKind::Weyl;
  double phi = 1.0;  // meaningful for Decimated only

  std::string describe() const;
};

// Levels rescaled to unit mean spacing.
class UnfoldedSpectrum {
 public:
  UnfoldedSpectrum(std::vector<double> values, Provenance provenance, std::size_t source_count);

  std::span<const double> values() const { return values_; }
  const Provenance& provenance() const { return provenance_; }
  std::size_t source_count() const { return source_count_; }
  std::size_t size() const { return values_.size(); }

  // (last - first) / (size - 1)
  double mean_spacing() const;

 private:
  std::vector<double> values_;
  Provenance provenance_;
  std::size_t source_count_;
};

struct SParameterTrace {
  std::vector<double> frequency_ghz;
  std::vector<std::complex<double>> s12;
  std::vector<std::complex<double>> s21;

  void validate() const;
};

// Smooth integrated level count of a billiard at frequency nu (GHz).
double weyl_count(const BilliardGeometry& geometry, double nu_ghz);

// Frequency (GHz) at which weyl_count reaches `count`, on the increasing
// branch of the quadratic.
double weyl_inverse(const BilliardGeometry& geometry, double count);

// Offset that places the lowest level at count 0.5.
double calibrated_weyl_offset(const BilliardGeometry& geometry, double lowest_level_ghz);

UnfoldedSpectrum unfold_weyl(const LevelSequence& levels, const BilliardGeometry& geometry);

// Least-squares polynomial fit of the staircase N(e_i) = i - 1/2.
UnfoldedSpectrum unfold_polynomial(const LevelSequence& levels, int degree);

// Integrated semicircle density for an n x n matrix with semicircle radius
// `radius`. Intended for full (or bulk-selected) random-matrix spectra.
UnfoldedSpectrum unfold_semicircle(const LevelSequence& levels, std::size_t matrix_dim, double radius);

// Keeps each level independently with probability phi and rescales the
// survivors by phi.
UnfoldedSpectrum decimate(const UnfoldedSpectrum& spectrum, double phi, RandomStream& rng);

struct WindowCoefficient {
  double start_ghz = 0.0;
  double stop_ghz = 0.0;
  std::size_t points = 0;
  double coefficient = 0.0;
};

// Cross-correlation of two fluctuating channels, means removed from each
// channel over the supplied range.
double cross_correlation_coefficient(std::span<const std::complex<double>> s12,
                                     std::span<const std::complex<double>> s21);

// Splits the trace into consecutive windows of width `window_ghz` and returns
// the coefficient of each. A trailing window with fewer than
// kMinWindowPoints points is dropped.
std::vector<WindowCoefficient> cross_correlation(const SParameterTrace& trace, double window_ghz);

inline constexpr std::size_t kMinWindowPoints = 20;

}  // namespace tivstat
