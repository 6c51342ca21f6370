#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tivstat/spectra.hpp"
#include "tivstat/stat_curve.hpp"

namespace tivstat {

struct SpacingSample {
  std::vector<double> spacings;
  int order = 1;  // 1 = nearest neighbour
};

// e_{i+k} - e_i for all valid i.
SpacingSample kth_neighbor_spacings(const UnfoldedSpectrum& spectrum, int k);

// Pools the k-th neighbour spacings of several spectra.
SpacingSample pooled_spacings(std::span<const UnfoldedSpectrum> spectra, int k);

inline constexpr double kDefaultBinWidth = 0.2;

// Density histogram on bins [j w, (j+1) w); x at bin centres.
StatCurve spacing_histogram(const SpacingSample& sample, double bin_width = kDefaultBinWidth);

// Empirical CDF (fraction of spacings <= s) on `grid`.
StatCurve spacing_cumulant(const SpacingSample& sample, std::span<const double> grid);

// Windows of length L slid with step L/4, starting at a per-spectrum offset
// in [0, L/4). Variance of the counts pooled over windows and spectra;
// y_err is the standard error across spectra.
StatCurve number_variance(std::span<const UnfoldedSpectrum> spectra, std::span<const double> l_grid);

// Dyson-Mehta Delta_3 with the least-squares line fitted in closed form on
// every window; window placement as in number_variance.
StatCurve rigidity(std::span<const UnfoldedSpectrum> spectra, std::span<const double> l_grid);

// Minimum over (a, b) of (1/L) \int_x^{x+L} [N(e) - a - b e]^2 de for the
// sorted levels of one spectrum, evaluated exactly from the staircase.
double window_rigidity(std::span<const double> levels, double x, double length);

enum class PowerWindowScaling {
  // Each window of n_common levels is rescaled to unit mean spacing before
  // delta_q is formed. Without this a decimated spectrum keeps a random-walk
  // drift of its local level density, which doubles the 1/(4 sin^2) term of
  // the incomplete-spectrum prediction.
  UnitMeanSpacing,
  // delta_q from the levels as given.
  None,
};

// Ensemble-averaged power spectrum of delta_q = e_{q+1} - e_1 - q over the
// first n_common levels; x = tau / n_common for tau = 1 .. n_common / 2.
StatCurve power_spectrum(std::span<const UnfoldedSpectrum> spectra, std::size_t n_common,
                         PowerWindowScaling scaling = PowerWindowScaling::UnitMeanSpacing);

// Spectra shorter than 10 L are skipped for that L.
inline constexpr double kMinLengthPerWindow = 10.0;

}  // namespace tivstat
