#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace tivstat {

// Neumaier-compensated accumulator. Sums taken in a fixed order through this
// type are reproducible to the last few ulps regardless of magnitude spread.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double v) {
    add(v);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> values) {
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

inline double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return compensated_sum(values) / static_cast<double>(values.size());
}

// Unbiased sample variance; zero for fewer than two values.
inline double sample_variance(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  CompensatedSum acc;
  for (double v : values) acc.add((v - m) * (v - m));
  return acc.value() / static_cast<double>(values.size() - 1);
}

// Closed grid start, start+step, ... up to stop (inclusive within 1e-9 step).
inline std::vector<double> arange_inclusive(double start, double stop, double step) {
  std::vector<double> out;
  if (!(step > 0.0) || stop < start) return out;
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
  out.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace tivstat
