#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "tivstat/rmt.hpp"

namespace tivstat {

// Above this crossover strength exp(2 xi^2 pi^2) makes the cluster-function
// integrals lose all precision; the GOE->GUE transition is complete by then.
inline constexpr double kMaxTheoryXi = 1.5;

struct TheoryParams {
  double xi = 0.0;
  double phi = 1.0;
  double tolerance = 1e-8;
  double r_max = 200.0;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Nearest-neighbour spacing distribution of the GOE-GUE crossover
// (Wigner-like two-level approximation).

double c_of_lambda(double lambda);

// P(s; lambda) for an arbitrary coupling lambda >= 0. lambda == 0 gives the
// GOE surmise exactly.
double crossover_spacing_pdf_lambda(double s, double lambda);

// P(s) at crossover strength xi, lambda = 2 xi.
double crossover_spacing_pdf(double s, double xi);

double wigner_goe(double s);
double wigner_gue(double s);

// ---------------------------------------------------------------------------
// Two-point cluster function and the statistics derived from it.

// Y2(L; xi) = s(L)^2 - D(L; xi) J(L; xi).
double cluster_y2(double L, double xi);

// Number variance of the complete spectrum.
double sigma2_theory(double L, double xi);

// Spectral rigidity of the complete spectrum.
double delta3_theory(double L, double xi);

// b(t) = \int Y2(r) exp(-2 pi i r t) dr, evaluated by quadrature for every xi
// (no closed-form shortcut). Used to cross-check the closed forms.
double form_factor_b_numeric(double t, double xi);

double goe_form_factor_b(double t);
double gue_form_factor_b(double t);

// K(t) = 1 - b(t) for 0 <= t <= 1. Closed forms at xi == 0 and xi >= 1,
// tabulated transform in between.
double form_factor_k(double t, double xi);

// ---------------------------------------------------------------------------
// Incomplete spectra: a fraction phi of the levels observed at random.

// gamma s^mu exp(-chi s^2)
struct PtildeParams {
  double gamma = 0.0;
  double mu = 0.0;
  double chi = 0.0;

  double operator()(double s) const;
  double mass() const;  // analytic \int_0^inf
  double mean() const;  // analytic first moment / mass

  // gamma that makes the mass exactly one.
  static double normalizing_gamma(double mu, double chi);
  // chi that puts the mean of a normalized density at `mean`.
  static double chi_for_mean(double mu, double mean);
};

// P(n; s) for the complete spectrum: n == 0 analytic, n == 1, 2 fitted
// gamma s^mu exp(-chi s^2), n >= 3 Gaussians centred at n + 1 with variance
// Sigma^2(n) - 1/6.
struct NthNeighborModel {
  double xi = 0.0;
  std::array<PtildeParams, 2> fitted{};  // n = 1, 2

  double gaussian_variance(int n) const;
  double density(int n, double s) const;
};

// Number of terms kept in the missing-level sum: the largest n with
// (1 - phi)^n >= 1e-8.
int missing_level_terms(double phi);

double missing_spacing_pdf(double s, double xi, double phi, const NthNeighborModel& model);
double missing_sigma2(double L, double xi, double phi);
double missing_delta3(double L, double xi, double phi);

// Power spectrum of an incomplete spectrum at t = tau / N in (0, 1).
double missing_power_spectrum(double t, double xi, double phi);

// Simulation settings used for the n = 1, 2 fits unless the caller supplies
// its own: 500 matrices of dimension 500.
EnsembleConfig default_model_config(double xi);

// Simulates the complete-spectrum ensemble, fits the next and second-next
// neighbour spacing histograms. Results are cached per (xi, config).
NthNeighborModel build_nth_neighbor_model(double xi, const EnsembleConfig& sim_config);

inline constexpr double kModelBinWidth = 0.1;

}  // namespace tivstat
