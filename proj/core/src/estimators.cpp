#include "tivstat/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tivstat/error.hpp"
#include "tivstat/numeric.hpp"

namespace tivstat {

std::vector<double> StatCurve::xs() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.x);
  return out;
}

std::vector<double> StatCurve::ys() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.y);
  return out;
}

void StatCurve::validate(bool nonnegative) const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].y)) throw DataError(kind + ": non-finite y");
    if (nonnegative && points[i].y < 0.0) throw DataError(kind + ": negative y");
    if (i > 0 && !(points[i].x > points[i - 1].x)) throw DataError(kind + ": x not strictly increasing");
  }
}

SpacingSample kth_neighbor_spacings(const UnfoldedSpectrum& spectrum, int k) {
  if (k < 1) throw DomainError("kth_neighbor_spacings: k must be at least 1");
  const auto v = spectrum.values();
  if (static_cast<std::size_t>(k) >= v.size()) throw DomainError("kth_neighbor_spacings: k >= spectrum length");
  SpacingSample out;
  out.order = k;
  out.spacings.reserve(v.size() - static_cast<std::size_t>(k));
  for (std::size_t i = 0; i + static_cast<std::size_t>(k) < v.size(); ++i) {
    out.spacings.push_back(v[i + static_cast<std::size_t>(k)] - v[i]);
  }
  return out;
}

SpacingSample pooled_spacings(std::span<const UnfoldedSpectrum> spectra, int k) {
  SpacingSample out;
  out.order = k;
  for (const auto& s : spectra) {
    if (static_cast<std::size_t>(k) >= s.size()) continue;
    auto part = kth_neighbor_spacings(s, k);
    out.spacings.insert(out.spacings.end(), part.spacings.begin(), part.spacings.end());
  }
  return out;
}

StatCurve spacing_histogram(const SpacingSample& sample, double bin_width) {
  if (!(bin_width > 0.0)) throw DomainError("spacing_histogram: bin width must be positive");
  if (sample.spacings.empty()) throw DataError("spacing_histogram: empty sample");
  const double smax = *std::max_element(sample.spacings.begin(), sample.spacings.end());
  const auto bins = static_cast<std::size_t>(std::floor(smax / bin_width)) + 1;
  std::vector<std::size_t> counts(bins, 0);
  for (double s : sample.spacings) {
    auto j = static_cast<std::size_t>(std::floor(s / bin_width));
    counts[std::min(j, bins - 1)] += 1;
  }
  StatCurve curve;
  curve.kind = sample.order == 1 ? "nn_pdf" : "kth_pdf(" + std::to_string(sample.order) + ")";
  curve.meta.bin_width = bin_width;
  const double norm = static_cast<double>(sample.spacings.size()) * bin_width;
  for (std::size_t j = 0; j < bins; ++j) {
    const double x = (static_cast<double>(j) + 0.5) * bin_width;
    const double c = static_cast<double>(counts[j]);
    curve.points.push_back({x, c / norm, std::sqrt(c) / norm});
  }
  return curve;
}

StatCurve spacing_cumulant(const SpacingSample& sample, std::span<const double> grid) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("spacing_cumulant: grid must be increasing");
  }
  if (sample.spacings.empty()) throw DataError("spacing_cumulant: empty sample");
  std::vector<double> sorted = sample.spacings;
  std::sort(sorted.begin(), sorted.end());
  StatCurve curve;
  curve.kind = sample.order == 1 ? "nn_cdf" : "kth_cdf(" + std::to_string(sample.order) + ")";
  const double n = static_cast<double>(sorted.size());
  for (double s : grid) {
    const auto below = std::upper_bound(sorted.begin(), sorted.end(), s) - sorted.begin();
    const double f = static_cast<double>(below) / n;
    curve.points.push_back({s, f, std::sqrt(f * (1.0 - f) / n)});
  }
  return curve;
}

namespace {

// Deterministic low-discrepancy fraction used to dither window starts.
double dither_fraction(std::size_t spectrum_index) {
  const double golden = 0.6180339887498949;
  const double v = static_cast<double>(spectrum_index) * golden;
  return v - std::floor(v);
}

template <class WindowStat>
std::vector<std::vector<double>> window_statistics(std::span<const UnfoldedSpectrum> spectra, double length,
                                                   WindowStat&& stat) {
  std::vector<std::vector<double>> per_spectrum;
  const double step = 0.25 * length;
  for (std::size_t j = 0; j < spectra.size(); ++j) {
    const auto v = spectra[j].values();
    if (static_cast<double>(v.size()) < kMinLengthPerWindow * length) continue;
    std::vector<double> values;
    const double first = v.front() + dither_fraction(j) * step;
    for (std::size_t m = 0;; ++m) {
      const double x = first + static_cast<double>(m) * step;
      if (x + length > v.back()) break;
      values.push_back(stat(v, x, length));
    }
    if (!values.empty()) per_spectrum.push_back(std::move(values));
  }
  return per_spectrum;
}

void check_lengths(std::span<const double> l_grid, const char* what) {
  for (double l : l_grid) {
    if (!(l > 0.0)) throw DomainError(std::string(what) + ": window lengths must be positive");
  }
}

double window_count(std::span<const double> v, double x, double length) {
  const auto lo = std::lower_bound(v.begin(), v.end(), x);
  const auto hi = std::lower_bound(lo, v.end(), x + length);
  return static_cast<double>(hi - lo);
}

}  // namespace

double window_rigidity(std::span<const double> levels, double x, double length) {
  // n(t) = number of levels in (x, x + t], piecewise constant on [0, L].
  auto it = std::upper_bound(levels.begin(), levels.end(), x);
  double t_prev = 0.0;
  double count = 0.0;
  CompensatedSum i0, i1, i2;
  auto add_segment = [&](double t_next) {
    const double dt = t_next - t_prev;
    i0 += count * dt;
    i1 += count * 0.5 * (t_next * t_next - t_prev * t_prev);
    i2 += count * count * dt;
  };
  for (; it != levels.end() && *it - x <= length; ++it) {
    const double t = *it - x;
    add_segment(t);
    t_prev = t;
    count += 1.0;
  }
  add_segment(length);
  const double l = length;
  const double centred = i1.value() - 0.5 * l * i0.value();
  const double residual = i2.value() - i0.value() * i0.value() / l - 12.0 * centred * centred / (l * l * l);
  return std::max(residual, 0.0) / l;
}

namespace {

StatCurve windowed_curve(std::span<const UnfoldedSpectrum> spectra, std::span<const double> l_grid,
                         const std::string& kind, bool variance_of_counts) {
  check_lengths(l_grid, kind.c_str());
  if (spectra.empty()) throw DataError(kind + ": no spectra");
  StatCurve curve;
  curve.kind = kind;
  curve.meta.n_spectra = spectra.size();
  for (double length : l_grid) {
    std::vector<std::vector<double>> per_spectrum =
        variance_of_counts ? window_statistics(spectra, length, window_count)
                           : window_statistics(spectra, length, window_rigidity);
    if (per_spectrum.empty()) {
      std::ostringstream os;
      os << kind << ": L=" << length << " omitted, every spectrum shorter than " << kMinLengthPerWindow << " L";
      curve.warnings.push_back(os.str());
      continue;
    }
    std::vector<double> estimates;
    estimates.reserve(per_spectrum.size());
    double value = 0.0;
    if (variance_of_counts) {
      CompensatedSum total;
      std::size_t windows = 0;
      for (const auto& counts : per_spectrum) {
        for (double c : counts) total += c;
        windows += counts.size();
      }
      const double pooled_mean = total.value() / static_cast<double>(windows);
      CompensatedSum dev;
      for (const auto& counts : per_spectrum) {
        CompensatedSum own;
        for (double c : counts) {
          dev += (c - pooled_mean) * (c - pooled_mean);
          own += (c - pooled_mean) * (c - pooled_mean);
        }
        estimates.push_back(own.value() / static_cast<double>(counts.size()));
      }
      value = dev.value() / static_cast<double>(windows);
    } else {
      CompensatedSum total;
      std::size_t windows = 0;
      for (const auto& deltas : per_spectrum) {
        total += compensated_sum(deltas);
        windows += deltas.size();
        estimates.push_back(mean(deltas));
      }
      value = total.value() / static_cast<double>(windows);
    }
    std::optional<double> err;
    if (estimates.size() >= 2) err = std::sqrt(sample_variance(estimates) / static_cast<double>(estimates.size()));
    curve.points.push_back({length, value, err});
  }
  return curve;
}

}  // namespace

StatCurve number_variance(std::span<const UnfoldedSpectrum> spectra, std::span<const double> l_grid) {
  return windowed_curve(spectra, l_grid, "sigma2", true);
}

StatCurve rigidity(std::span<const UnfoldedSpectrum> spectra, std::span<const double> l_grid) {
  return windowed_curve(spectra, l_grid, "delta3", false);
}

StatCurve power_spectrum(std::span<const UnfoldedSpectrum> spectra, std::size_t n_common, PowerWindowScaling scaling) {
  if (n_common < 2) throw DomainError("power_spectrum: N_common must be at least 2");
  if (spectra.empty()) throw DataError("power_spectrum: no spectra");
  for (std::size_t j = 0; j < spectra.size(); ++j) {
    if (spectra[j].size() < n_common) {
      std::ostringstream os;
      os << "power_spectrum: spectrum " << j << " has " << spectra[j].size() << " levels, fewer than N_common="
         << n_common;
      throw DataError(os.str());
    }
  }
  const std::size_t n = n_common;
  const std::size_t taus = n / 2;
  std::vector<double> cos_table(n), sin_table(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    cos_table[k] = std::cos(angle);
    sin_table[k] = std::sin(angle);
  }

  std::vector<std::vector<double>> per_tau(taus, std::vector<double>(spectra.size()));
  std::vector<double> delta(n);
  for (std::size_t j = 0; j < spectra.size(); ++j) {
    const auto v = spectra[j].values();
    double scale = 1.0;
    if (scaling == PowerWindowScaling::UnitMeanSpacing) scale = static_cast<double>(n - 1) / (v[n - 1] - v[0]);
    for (std::size_t q = 0; q < n; ++q) delta[q] = (v[q] - v[0]) * scale - static_cast<double>(q);
    for (std::size_t tau = 1; tau <= taus; ++tau) {
      CompensatedSum re, im;
      std::size_t idx = 0;
      for (std::size_t q = 0; q < n; ++q) {
        re += delta[q] * cos_table[idx];
        im += -delta[q] * sin_table[idx];
        idx += tau;
        if (idx >= n) idx -= n;
      }
      per_tau[tau - 1][j] = (re.value() * re.value() + im.value() * im.value()) / static_cast<double>(n);
    }
  }

  StatCurve curve;
  curve.kind = "power_spectrum";
  curve.meta.n_spectra = spectra.size();
  for (std::size_t tau = 1; tau <= taus; ++tau) {
    const auto& vals = per_tau[tau - 1];
    std::optional<double> err;
    if (vals.size() >= 2) err = std::sqrt(sample_variance(vals) / static_cast<double>(vals.size()));
    curve.points.push_back({static_cast<double>(tau) / static_cast<double>(n), mean(vals), err});
  }
  return curve;
}

}  // namespace tivstat
