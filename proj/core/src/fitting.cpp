#include "tivstat/fitting.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "tivstat/numeric.hpp"

namespace tivstat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Ratio <s^2> / <s>^2 of a normalized gamma s^mu exp(-chi s^2); independent
// of chi and decreasing in mu.
double moment_ratio(double mu) {
  return std::exp(std::lgamma(0.5 * (mu + 3.0)) + std::lgamma(0.5 * (mu + 1.0)) - 2.0 * std::lgamma(0.5 * (mu + 2.0)));
}

double initial_mu(double ratio) {
  double lo = -0.9;
  double hi = 200.0;
  if (ratio >= moment_ratio(lo)) return lo;
  if (ratio <= moment_ratio(hi)) return hi;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (moment_ratio(mid) > ratio) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct LmOutcome {
  Eigen::VectorXd params;
  double sse = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Levenberg-Marquardt with a central-difference Jacobian. `residuals` returns
// false for parameters outside the admissible region.
LmOutcome levenberg_marquardt(const std::function<bool(const Eigen::VectorXd&, Eigen::VectorXd&)>& residuals,
                              Eigen::VectorXd p, double rel_step_tol, int max_iter) {
  Eigen::VectorXd r;
  if (!residuals(p, r)) throw NumericalError("fit: initial guess outside the admissible region");
  double sse = r.squaredNorm();
  double damping = 1e-3;
  const auto np = p.size();
  Eigen::MatrixXd jac(r.size(), np);
  Eigen::VectorXd rp, rm;

  for (int iter = 1; iter <= max_iter; ++iter) {
    for (Eigen::Index k = 0; k < np; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(p(k)));
      Eigen::VectorXd pp = p;
      Eigen::VectorXd pm = p;
      pp(k) += h;
      pm(k) -= h;
      const bool okp = residuals(pp, rp);
      const bool okm = residuals(pm, rm);
      if (okp && okm) {
        jac.col(k) = (rp - rm) / (2.0 * h);
      } else if (okp) {
        jac.col(k) = (rp - r) / h;
      } else if (okm) {
        jac.col(k) = (r - rm) / h;
      } else {
        throw NumericalError("fit: Jacobian undefined at the current iterate");
      }
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    if (sse == 0.0 || grad.norm() == 0.0) return {p, sse, iter, true};

    for (int attempt = 0; attempt < 60; ++attempt) {
      Eigen::MatrixXd a = jtj;
      for (Eigen::Index k = 0; k < np; ++k) a(k, k) += damping * std::max(jtj(k, k), 1e-12);
      const Eigen::VectorXd step = a.ldlt().solve(-grad);
      double rel = 0.0;
      for (Eigen::Index k = 0; k < np; ++k) rel = std::max(rel, std::abs(step(k)) / std::max(std::abs(p(k)), 1e-3));
      const Eigen::VectorXd trial = p + step;
      Eigen::VectorXd rt;
      if (residuals(trial, rt) && rt.squaredNorm() <= sse) {
        p = trial;
        r = rt;
        sse = rt.squaredNorm();
        damping = std::max(damping / 3.0, 1e-12);
        if (rel < rel_step_tol) return {p, sse, iter, true};
        break;
      }
      if (rel < rel_step_tol) return {p, sse, iter, true};
      damping *= 4.0;
    }
  }
  return {p, sse, max_iter, false};
}

}  // namespace

PtildeFit fit_ptilde(const StatCurve& histogram, std::optional<double> target_mean) {
  if (histogram.points.size() < 3) throw DataError("fit_ptilde: histogram needs at least three bins");
  if (target_mean && !(*target_mean > 0.0)) throw DomainError("fit_ptilde: target mean must be positive");
  const auto xs = histogram.xs();
  const auto ys = histogram.ys();

  CompensatedSum m0, m1, m2;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    m0 += ys[i];
    m1 += ys[i] * xs[i];
    m2 += ys[i] * xs[i] * xs[i];
  }
  if (!(m0.value() > 0.0)) throw DataError("fit_ptilde: empty histogram");
  const double mean = m1.value() / m0.value();
  const double ratio = m2.value() * m0.value() / (m1.value() * m1.value());
  const double mu0 = std::max(initial_mu(ratio), 0.0);
  const double fixed_mean = target_mean.value_or(mean);

  auto make = [&](const Eigen::VectorXd& p, PtildeParams& out) {
    const double mu = p(0);
    if (!(mu > -0.99) || mu > 500.0) return false;
    const double chi = target_mean ? PtildeParams::chi_for_mean(mu, *target_mean) : std::exp(p(1));
    if (!(chi > 0.0) || !std::isfinite(chi)) return false;
    out = {PtildeParams::normalizing_gamma(mu, chi), mu, chi};
    return std::isfinite(out.gamma);
  };
  auto residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    PtildeParams model;
    if (!make(p, model)) return false;
    r.resize(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) r(static_cast<Eigen::Index>(i)) = model(xs[i]) - ys[i];
    return r.allFinite();
  };

  Eigen::VectorXd p0(target_mean ? 1 : 2);
  p0(0) = mu0;
  if (!target_mean) p0(1) = std::log(PtildeParams::chi_for_mean(mu0, fixed_mean));

  const LmOutcome outcome = levenberg_marquardt(residuals, p0, 1e-8, kMaxFitIterations);
  PtildeParams result;
  make(outcome.params, result);
  if (!outcome.converged) {
    std::ostringstream os;
    os << "fit_ptilde: no convergence after " << kMaxFitIterations << " iterations (last mu=" << result.mu
       << ", chi=" << result.chi << ")";
    throw FitError(os.str(), histogram, result);
  }
  return {result, outcome.sse, outcome.iterations};
}

namespace {

struct SelectedPoints {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> weight;
  bool weighted = false;
};

SelectedPoints select_points(const StatCurve& curve, std::pair<double, double> range, bool log_space,
                             const char* what) {
  SelectedPoints sel;
  bool all_errors = true;
  for (const auto& p : curve.points) {
    if (p.x < range.first || p.x > range.second) continue;
    if (log_space && !(p.y > 0.0)) {
      std::ostringstream os;
      os << what << ": non-positive value " << p.y << " at x=" << p.x;
      throw DataError(os.str());
    }
    sel.x.push_back(p.x);
    sel.y.push_back(log_space ? std::log(p.y) : p.y);
    double w = 1.0;
    if (p.y_err && *p.y_err > 0.0) {
      const double sigma = log_space ? *p.y_err / p.y : *p.y_err;
      w = 1.0 / (sigma * sigma);
    } else {
      all_errors = false;
    }
    sel.weight.push_back(w);
  }
  if (!all_errors) std::fill(sel.weight.begin(), sel.weight.end(), 1.0);
  sel.weighted = all_errors && !sel.x.empty();
  if (sel.x.size() < 3) {
    std::ostringstream os;
    os << what << ": fewer than three points in [" << range.first << ", " << range.second << "]";
    throw DataError(os.str());
  }
  return sel;
}

double scaled_error(double curvature, double objective, const SelectedPoints& sel, std::size_t n_params) {
  if (!(curvature > 0.0) || !std::isfinite(curvature)) return kInf;
  const double dof = static_cast<double>(sel.x.size() - n_params);
  const double reduced = objective / dof;
  const double scale = sel.weighted ? std::max(1.0, reduced) : reduced;
  return std::sqrt(2.0 * scale / curvature);
}

}  // namespace

FitResult fit_phi(const StatCurve& power, double xi, const PhiFitOptions& options) {
  if (options.range.first <= 0.0 || options.range.second >= 1.0 || options.range.first >= options.range.second) {
    throw DomainError("fit_phi: fit range must lie inside (0, 1)");
  }
  const auto [lo, hi] = options.bounds;
  if (!(lo > 0.0) || hi > 1.0 || lo >= hi) throw DomainError("fit_phi: phi bounds must lie in (0, 1]");
  const SelectedPoints sel = select_points(power, options.range, true, "fit_phi");

  auto objective = [&](double phi) {
    CompensatedSum q;
    for (std::size_t i = 0; i < sel.x.size(); ++i) {
      const double th = missing_power_spectrum(sel.x[i], xi, phi);
      if (!(th > 0.0)) return kInf;
      const double d = sel.y[i] - std::log(th);
      q += sel.weight[i] * d * d;
    }
    return q.value();
  };

  FitResult result;
  result.range = options.range;
  result.bounds = options.bounds;
  result.points = sel.x.size();
  const auto grid = arange_inclusive(lo, hi, options.grid_step);
  std::size_t best = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    result.profile.emplace_back(grid[k], objective(grid[k]));
    if (result.profile[k].second < result.profile[best].second) best = k;
  }
  if (!std::isfinite(result.profile[best].second)) throw NumericalError("fit_phi: objective undefined on the grid");

  // Golden-section refinement inside the neighbouring grid cells.
  double a = grid[best > 0 ? best - 1 : 0];
  double b = grid[std::min(best + 1, grid.size() - 1)];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = objective(d);
    }
  }
  double est = 0.5 * (a + b);
  double q_min = objective(est);
  for (double edge : {lo, hi}) {
    const double qe = objective(edge);
    if (qe < q_min) {
      est = edge;
      q_min = qe;
    }
  }

  const double h = 1e-3;
  double curvature = 0.0;
  if (est - h >= lo && est + h <= hi) {
    curvature = (objective(est + h) - 2.0 * q_min + objective(est - h)) / (h * h);
  } else if (est - 2.0 * h >= lo) {
    curvature = (q_min - 2.0 * objective(est - h) + objective(est - 2.0 * h)) / (h * h);
  } else {
    curvature = (q_min - 2.0 * objective(est + h) + objective(est + 2.0 * h)) / (h * h);
  }
  if (!(curvature > 1e-10) || !std::isfinite(curvature)) {
    throw NumericalError("fit_phi: objective is flat around the minimum, phi is not identifiable");
  }

  result.estimate = est;
  result.objective = q_min;
  result.standard_error = std::max(scaled_error(curvature, q_min, sel, 1), 1e-12);
  result.at_boundary = est - lo < 0.5 * options.grid_step || hi - est < 0.5 * options.grid_step;
  if (result.at_boundary) result.warnings.push_back("fit_phi: minimum at the boundary of the phi search interval");
  return result;
}

FitResult fit_xi(const StatCurve& sigma2, double phi, const XiFitOptions& options) {
  const auto [lo, hi] = options.bounds;
  if (lo < 0.0 || hi > kMaxTheoryXi || lo >= hi) throw DomainError("fit_xi: xi bounds outside [0, 1.5]");
  if (!(phi > 0.0) || phi > 1.0) throw DomainError("fit_xi: phi must lie in (0, 1]");
  const SelectedPoints sel = select_points(sigma2, options.range, false, "fit_xi");

  auto objective = [&](double xi) {
    CompensatedSum q;
    for (std::size_t i = 0; i < sel.x.size(); ++i) {
      const double d = sel.y[i] - missing_sigma2(sel.x[i], xi, phi);
      q += sel.weight[i] * d * d;
    }
    return q.value();
  };

  FitResult result;
  result.range = options.range;
  result.bounds = options.bounds;
  result.points = sel.x.size();
  const auto grid = arange_inclusive(lo, hi, options.grid_step);
  if (grid.size() < 3) throw DomainError("fit_xi: search grid needs at least three points");
  std::size_t best = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    result.profile.emplace_back(grid[k], objective(grid[k]));
    if (result.profile[k].second < result.profile[best].second) best = k;
  }

  const double h = options.grid_step;
  double est = grid[best];
  double q_min = result.profile[best].second;
  double curvature = 0.0;
  if (best > 0 && best + 1 < grid.size()) {
    const double qm = result.profile[best - 1].second;
    const double qp = result.profile[best + 1].second;
    const double second = qm - 2.0 * q_min + qp;
    curvature = second / (h * h);
    if (second > 0.0) {
      const double shift = 0.5 * h * (qm - qp) / second;
      est = std::clamp(est + shift, grid[best - 1], grid[best + 1]);
      q_min = objective(est);
    }
  } else {
    result.at_boundary = true;
    result.warnings.push_back("fit_xi: minimum at the boundary of the xi search interval");
    const std::size_t i0 = best == 0 ? 0 : grid.size() - 3;
    curvature = (result.profile[i0].second - 2.0 * result.profile[i0 + 1].second + result.profile[i0 + 2].second) /
                (h * h);
  }

  result.estimate = est;
  result.objective = q_min;
  double err = scaled_error(curvature, q_min, sel, 1);
  if (!std::isfinite(err)) err = hi - lo;
  result.standard_error = std::max({err, options.relative_error_floor * est, h});
  return result;
}

}  // namespace tivstat
