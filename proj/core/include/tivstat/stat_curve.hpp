#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tivstat {

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
  std::optional<double> y_err;
};

struct CurveMeta {
  std::optional<double> xi;
  std::optional<double> phi;
  std::size_t n_spectra = 0;
  std::optional<double> bin_width;
};

// A sampled statistic. `kind` is a short tag such as "nn_pdf", "sigma2",
// "kth_pdf(2)" or "theory_power".
struct StatCurve {
  std::string kind;
  std::vector<CurvePoint> points;
  CurveMeta meta;
  std::vector<std::string> warnings;

  std::vector<double> xs() const;
  std::vector<double> ys() const;

  // x strictly increasing and y finite; y >= 0 when `nonnegative`.
  void validate(bool nonnegative) const;
};

}  // namespace tivstat
