#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tivstat/error.hpp"
#include "tivstat/stat_curve.hpp"
#include "tivstat/theory.hpp"

namespace tivstat {

// Raised when the P~(s) fit fails; carries the histogram for diagnosis.
class FitError : public NumericalError {
 public:
  FitError(const std::string& what, StatCurve histogram, PtildeParams last)
      : NumericalError(what), histogram_(std::move(histogram)), last_(last) {}

  const StatCurve& histogram() const { return histogram_; }
  const PtildeParams& last_iterate() const { return last_; }

 private:
  StatCurve histogram_;
  PtildeParams last_;
};

struct PtildeFit {
  PtildeParams params;
  double objective = 0.0;  // sum of squared residuals
  int iterations = 0;
};

// Least squares of gamma s^mu exp(-chi s^2) against a density histogram, with
// gamma eliminated so that the fitted density has unit mass. If `target_mean`
// is given, chi is also eliminated so the mean is fixed, leaving a search over
// mu alone.
PtildeFit fit_ptilde(const StatCurve& histogram, std::optional<double> target_mean = std::nullopt);

inline constexpr int kMaxFitIterations = 200;

struct FitResult {
  double estimate = 0.0;
  double standard_error = 0.0;
  double objective = 0.0;
  std::pair<double, double> range{0.0, 0.0};  // abscissa window used
  std::pair<double, double> bounds{0.0, 0.0};  // search interval
  std::size_t points = 0;
  bool at_boundary = false;
  std::vector<std::string> warnings;
  // Objective on the search grid, for diagnostics and convexity checks.
  std::vector<std::pair<double, double>> profile;
};

struct PhiFitOptions {
  std::pair<double, double> range{0.02, 0.3};
  std::pair<double, double> bounds{0.4, 1.0};
  double grid_step = 0.005;
};

// Fits phi by least squares of log <S> against the log of the incomplete
// spectrum power spectrum at fixed xi.
FitResult fit_phi(const StatCurve& power, double xi, const PhiFitOptions& options = {});

struct XiFitOptions {
  std::pair<double, double> range{0.5, 5.0};
  std::pair<double, double> bounds{0.0, 1.0};
  double grid_step = 0.01;
  // Relative floor on the reported standard error.
  double relative_error_floor = 0.2;
};

// Grid search of xi against the incomplete-spectrum number variance at
// fixed phi, refined by a parabola through the grid minimum.
FitResult fit_xi(const StatCurve& sigma2, double phi, const XiFitOptions& options = {});

}  // namespace tivstat
