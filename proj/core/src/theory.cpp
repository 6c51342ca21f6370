#include "tivstat/theory.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <sstream>

#include "tivstat/error.hpp"
#include "tivstat/numeric.hpp"
#include "tivstat/quadrature.hpp"
#include "tivstat/special.hpp"

namespace tivstat {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre order for the unit panels of Y2 integrals.
constexpr int kPanelOrder = 40;
// Order for the inner D / J integrals.
constexpr int kInnerOrder = 16;
// Below this value of 2 xi^2 pi^2, J is evaluated through the closed form of
// the full Gaussian-damped sine integral; above it the scaled tail integral
// is used directly.
constexpr double kErfRouteLimit = 10.0;
// Tail cut for the scaled J integral: exp(-a (x^2 - pi^2)) < 1e-16.
constexpr double kTailLog = 36.8413614879047;

void check_xi(double xi, const char* what) {
  if (!(xi >= 0.0) || xi > kMaxTheoryXi) {
    std::ostringstream os;
    os << what << ": xi=" << xi << " outside [0, " << kMaxTheoryXi << "]";
    throw DomainError(os.str());
  }
}

void check_phi(double phi, const char* what) {
  if (!(phi > 0.0) || phi > 1.0) {
    std::ostringstream os;
    os << what << ": phi=" << phi << " outside (0, 1]";
    throw DomainError(os.str());
  }
}

double sinc_pi_derivative(double L) {
  if (std::abs(L) < 1e-4) return -kPi * kPi * L / 3.0;
  return (std::cos(kPi * L) - sinc_pi(L)) / L;
}

int inner_panels(double length, double L, double a) {
  const double rate = std::abs(L) + 1.0 + 2.0 * a * kPi;
  return std::max(1, static_cast<int>(std::ceil(length * rate / 3.0)));
}

double cluster_y2_quadrature(double L, double xi) {
  const double a = 2.0 * xi * xi;
  const double s = sinc_pi(L);
  if (a * kPi * kPi <= kErfRouteLimit) {
    const int panels = inner_panels(kPi, L, a);
    const double d =
        integrate_panels([&](double x) { return std::exp(a * x * x) * x * std::sin(L * x); }, 0.0, kPi, panels,
                         kInnerOrder) /
        kPi;
    const double head =
        integrate_panels([&](double x) { return std::exp(-a * x * x) * std::sin(L * x) / x; }, 0.0, kPi, panels,
                         kInnerOrder) /
        kPi;
    // \int_0^inf exp(-a x^2) sin(L x) / x dx = (pi/2) erf(L / (2 sqrt(a)))
    const double j = 0.5 * std::erf(L / (2.0 * std::sqrt(a))) - head;
    return s * s - d * j;
  }
  // exp(+-a pi^2) factored out of D and J; the factors cancel in the product.
  const double pi2 = kPi * kPi;
  const double d_scaled =
      integrate_panels([&](double x) { return std::exp(a * (x * x - pi2)) * x * std::sin(L * x); }, 0.0, kPi,
                       inner_panels(kPi, L, a), kInnerOrder) /
      kPi;
  const double x_max = std::sqrt(pi2 + kTailLog / a);
  const double j_scaled =
      integrate_panels([&](double x) { return std::exp(-a * (x * x - pi2)) * std::sin(L * x) / x; }, kPi, x_max,
                       inner_panels(x_max - kPi, L, a), kInnerOrder) /
      kPi;
  return s * s - d_scaled * j_scaled;
}

// Y2 sampled at the Gauss-Legendre nodes of the unit panels [k, k+1].
class ClusterTable {
 public:
  ClusterTable(double xi, int panels, const ClusterTable* previous) : xi_(xi), panels_(panels) {
    const auto& rule = gauss_legendre(kPanelOrder);
    values_.resize(static_cast<std::size_t>(panels) * rule.size());
    std::size_t reuse = 0;
    if (previous != nullptr) {
      reuse = std::min(previous->values_.size(), values_.size());
      std::copy_n(previous->values_.begin(), reuse, values_.begin());
    }
    for (std::size_t idx = reuse; idx < values_.size(); ++idx) {
      const std::size_t p = idx / rule.size();
      const std::size_t k = idx % rule.size();
      values_[idx] = cluster_y2(static_cast<double>(p) + 0.5 + 0.5 * rule.nodes[k], xi_);
    }
  }

  int panels() const { return panels_; }
  double at(std::size_t panel, std::size_t node) const { return values_[panel * kPanelOrder + node]; }

 private:
  double xi_;
  int panels_;
  std::vector<double> values_;
};

class ClusterTableCache {
 public:
  std::shared_ptr<const ClusterTable> get(double xi, int panels_needed) {
    {
      std::shared_lock lock(mutex_);
      auto it = tables_.find(xi);
      if (it != tables_.end() && it->second->panels() >= panels_needed) return it->second;
    }
    std::unique_lock lock(mutex_);
    auto& slot = tables_[xi];
    if (slot && slot->panels() >= panels_needed) return slot;
    int panels = slot ? slot->panels() : 16;
    while (panels < panels_needed) panels *= 2;
    slot = std::make_shared<const ClusterTable>(xi, panels, slot.get());
    return slot;
  }

 private:
  std::shared_mutex mutex_;
  std::map<double, std::shared_ptr<const ClusterTable>> tables_;
};

ClusterTableCache& cluster_cache() {
  static ClusterTableCache cache;
  return cache;
}

// \int_0^upper w(r) Y2(r; xi) dr: tabulated full panels plus a direct
// evaluation of the partial last panel.
template <class Weight>
double integrate_against_y2(double xi, double upper, Weight&& w) {
  if (upper <= 0.0) return 0.0;
  const auto full = static_cast<int>(std::floor(upper));
  const auto& rule = gauss_legendre(kPanelOrder);
  CompensatedSum total;
  if (full > 0) {
    const auto table = cluster_cache().get(xi, full);
    for (int p = 0; p < full; ++p) {
      double part = 0.0;
      for (std::size_t k = 0; k < rule.size(); ++k) {
        const double r = p + 0.5 + 0.5 * rule.nodes[k];
        part += rule.weights[k] * w(r) * table->at(static_cast<std::size_t>(p), k);
      }
      total += 0.5 * part;
    }
  }
  const double rest = upper - full;
  if (rest > 0.0) {
    double part = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double r = full + 0.5 * rest * (1.0 + rule.nodes[k]);
      part += rule.weights[k] * w(r) * cluster_y2(r, xi);
    }
    total += 0.5 * rest * part;
  }
  return total.value();
}

constexpr double kFormFactorRMax = 200.0;
constexpr int kFormFactorNodes = 2000;

double form_factor_tail(double t) {
  // 2 \int_R^inf cos(2 pi r t) / (pi^2 r^2) dr for the non-oscillating
  // 1 / (pi^2 r^2) decay of Y2.
  const double r = kFormFactorRMax;
  const double w = 2.0 * kPi * t;
  if (w == 0.0) return 2.0 / (kPi * kPi * r);
  const double integral = std::cos(w * r) / r - w * (kPi / 2.0 - sine_integral(w * r));
  return 2.0 * integral / (kPi * kPi);
}

// b(t) tabulated on [0, 1] for one xi, four-point Lagrange interpolation.
class FormFactorTable {
 public:
  explicit FormFactorTable(double xi) : values_(kFormFactorNodes + 1) {
    for (int i = 0; i <= kFormFactorNodes; ++i) {
      values_[static_cast<std::size_t>(i)] = form_factor_b_numeric(static_cast<double>(i) / kFormFactorNodes, xi);
    }
  }

  double b(double t) const {
    const double u = t * kFormFactorNodes;
    int i = static_cast<int>(std::floor(u));
    i = std::clamp(i - 1, 0, kFormFactorNodes - 3);
    const double x = u - i;
    const double y0 = values_[static_cast<std::size_t>(i)];
    const double y1 = values_[static_cast<std::size_t>(i + 1)];
    const double y2 = values_[static_cast<std::size_t>(i + 2)];
    const double y3 = values_[static_cast<std::size_t>(i + 3)];
    return -y0 * (x - 1) * (x - 2) * (x - 3) / 6.0 + y1 * x * (x - 2) * (x - 3) / 2.0 -
           y2 * x * (x - 1) * (x - 3) / 2.0 + y3 * x * (x - 1) * (x - 2) / 6.0;
  }

 private:
  std::vector<double> values_;
};

std::shared_ptr<const FormFactorTable> form_factor_table(double xi) {
  static std::shared_mutex mutex;
  static std::map<double, std::shared_ptr<const FormFactorTable>> tables;
  {
    std::shared_lock lock(mutex);
    auto it = tables.find(xi);
    if (it != tables.end()) return it->second;
  }
  auto table = std::make_shared<const FormFactorTable>(xi);
  std::unique_lock lock(mutex);
  return tables.emplace(xi, std::move(table)).first->second;
}

}  // namespace

void TheoryParams::validate() const {
  check_xi(xi, "theory");
  check_phi(phi, "theory");
  if (!(tolerance > 0.0)) throw DomainError("theory: tolerance must be positive");
  if (!(r_max > 0.0)) throw DomainError("theory: r_max must be positive");
}

double c_of_lambda(double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("c_of_lambda: lambda must be non-negative");
  const double l2 = lambda * lambda;
  const double bracket =
      1.0 - (2.0 / kPi) * (std::atan(lambda / std::numbers::sqrt2) - std::numbers::sqrt2 * lambda / (2.0 + l2));
  return std::sqrt(kPi * (2.0 + l2) / 4.0) * bracket;
}

double crossover_spacing_pdf_lambda(double s, double lambda) {
  if (!(s >= 0.0)) throw DomainError("crossover_spacing_pdf: s must be non-negative");
  if (!(lambda >= 0.0)) throw DomainError("crossover_spacing_pdf: lambda must be non-negative");
  const double c = c_of_lambda(lambda);
  const double e = lambda == 0.0 ? 1.0 : std::erf(s * c / lambda);
  return s * std::sqrt((2.0 + lambda * lambda) / 2.0) * c * c * e * std::exp(-s * s * c * c / 2.0);
}

double crossover_spacing_pdf(double s, double xi) {
  check_xi(xi, "crossover_spacing_pdf");
  return crossover_spacing_pdf_lambda(s, 2.0 * xi);
}

double wigner_goe(double s) { return kPi / 2.0 * s * std::exp(-kPi * s * s / 4.0); }

double wigner_gue(double s) { return 32.0 / (kPi * kPi) * s * s * std::exp(-4.0 * s * s / kPi); }

double cluster_y2(double L, double xi) {
  check_xi(xi, "cluster_y2");
  if (!std::isfinite(L)) throw DomainError("cluster_y2: L must be finite");
  L = std::abs(L);
  if (L == 0.0) return 1.0;
  if (xi == 0.0) {
    const double s = sinc_pi(L);
    const double d = -sinc_pi_derivative(L);
    const double j = 0.5 - sine_integral(kPi * L) / kPi;
    return s * s - d * j;
  }
  return cluster_y2_quadrature(L, xi);
}

double sigma2_theory(double L, double xi) {
  check_xi(xi, "sigma2_theory");
  if (!(L >= 0.0)) throw DomainError("sigma2_theory: L must be non-negative");
  return L - 2.0 * integrate_against_y2(xi, L, [L](double r) { return L - r; });
}

double delta3_theory(double L, double xi) {
  check_xi(xi, "delta3_theory");
  if (!(L > 0.0)) throw DomainError("delta3_theory: L must be positive");
  const double l4 = L * L * L * L;
  const double integral = integrate_against_y2(xi, L, [L](double r) {
    const double u = L - r;
    return u * u * u * (2.0 * L * L - 9.0 * r * L - 3.0 * r * r);
  });
  return L / 15.0 - integral / (15.0 * l4);
}

double form_factor_b_numeric(double t, double xi) {
  check_xi(xi, "form_factor_b");
  const double w = 2.0 * kPi * t;
  const double body = integrate_against_y2(xi, kFormFactorRMax, [w](double r) { return std::cos(w * r); });
  return 2.0 * body + form_factor_tail(t);
}

double goe_form_factor_b(double t) {
  const double a = std::abs(t);
  return 1.0 - 2.0 * a + a * std::log1p(2.0 * a);
}

double gue_form_factor_b(double t) { return 1.0 - std::abs(t); }

double form_factor_k(double t, double xi) {
  check_xi(xi, "form_factor_k");
  if (!(t >= 0.0) || t > 1.0) throw DomainError("form_factor_k: t outside [0, 1]");
  if (xi == 0.0) return 1.0 - goe_form_factor_b(t);
  if (xi >= 1.0) return 1.0 - gue_form_factor_b(t);
  return 1.0 - form_factor_table(xi)->b(t);
}

// ---------------------------------------------------------------------------

double PtildeParams::operator()(double s) const {
  if (s <= 0.0) return 0.0;
  return gamma * std::exp(mu * std::log(s) - chi * s * s);
}

double PtildeParams::mass() const {
  const double h = 0.5 * (mu + 1.0);
  return gamma * std::exp(std::lgamma(h) - h * std::log(chi)) / 2.0;
}

double PtildeParams::mean() const {
  return std::exp(std::lgamma(0.5 * (mu + 2.0)) - std::lgamma(0.5 * (mu + 1.0))) / std::sqrt(chi);
}

double PtildeParams::normalizing_gamma(double mu, double chi) {
  const double h = 0.5 * (mu + 1.0);
  return 2.0 * std::exp(h * std::log(chi) - std::lgamma(h));
}

double PtildeParams::chi_for_mean(double mu, double mean) {
  const double r = std::exp(std::lgamma(0.5 * (mu + 2.0)) - std::lgamma(0.5 * (mu + 1.0))) / mean;
  return r * r;
}

double NthNeighborModel::gaussian_variance(int n) const { return sigma2_theory(n, xi) - 1.0 / 6.0; }

double NthNeighborModel::density(int n, double s) const {
  if (n < 0) throw DomainError("NthNeighborModel: negative order");
  if (n == 0) return crossover_spacing_pdf(s, xi);
  if (n <= 2) return fitted[static_cast<std::size_t>(n - 1)](s);
  const double v = gaussian_variance(n);
  const double d = s - n - 1.0;
  return std::exp(-d * d / (2.0 * v)) / std::sqrt(2.0 * kPi * v);
}

int missing_level_terms(double phi) {
  check_phi(phi, "missing_level_terms");
  if (phi == 1.0) return 0;
  const double q = 1.0 - phi;
  return static_cast<int>(std::floor(std::log(1e-8) / std::log(q) - 1e-12));
}

double missing_spacing_pdf(double s, double xi, double phi, const NthNeighborModel& model) {
  check_xi(xi, "missing_spacing_pdf");
  check_phi(phi, "missing_spacing_pdf");
  if (!(s >= 0.0)) throw DomainError("missing_spacing_pdf: s must be non-negative");
  if (model.xi != xi) throw DomainError("missing_spacing_pdf: model was built for a different xi");
  const int terms = missing_level_terms(phi);
  const double q = 1.0 - phi;
  const double x = s / phi;
  double total = 0.0;
  double weight = 1.0;
  for (int n = 0; n <= terms; ++n) {
    total += weight * model.density(n, x);
    weight *= q;
  }
  // Mass of the kept terms is 1 - q^(terms + 1).
  return total / (1.0 - weight);
}

double missing_sigma2(double L, double xi, double phi) {
  check_phi(phi, "missing_sigma2");
  return (1.0 - phi) * L + phi * phi * sigma2_theory(L / phi, xi);
}

double missing_delta3(double L, double xi, double phi) {
  check_phi(phi, "missing_delta3");
  return (1.0 - phi) * L / 15.0 + phi * phi * delta3_theory(L / phi, xi);
}

double missing_power_spectrum(double t, double xi, double phi) {
  check_phi(phi, "missing_power_spectrum");
  if (!(t > 0.0) || !(t < 1.0)) throw DomainError("missing_power_spectrum: t must lie strictly inside (0, 1)");
  const double u = 1.0 - t;
  const double k1 = form_factor_k(phi * t, xi);
  const double k2 = form_factor_k(phi * u, xi);
  const double sn = std::sin(kPi * t);
  return phi / (4.0 * kPi * kPi) * ((k1 - 1.0) / (t * t) + (k2 - 1.0) / (u * u)) + 1.0 / (4.0 * sn * sn) -
         phi * phi / 12.0;
}

EnsembleConfig default_model_config(double xi) {
  EnsembleConfig config;
  config.n = 500;
  config.count = 500;
  config.xi = xi;
  config.phi = 1.0;
  config.bulk_fraction = 0.6;
  config.seed = 20220501;
  return config;
}

}  // namespace tivstat
