#pragma once

#include <cstddef>
#include <vector>

namespace tivstat {

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

// Newton iteration on P_n; nodes ascending. Rules for a given order are
// computed once and shared.
const GaussLegendreRule& gauss_legendre(int order);

// Composite Gauss-Legendre over [a, b] split into `panels` equal panels.
template <class F>
double integrate_panels(F&& f, double a, double b, int panels, int order = 16) {
  const auto& rule = gauss_legendre(order);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    double part = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      part += rule.weights[k] * f(mid + 0.5 * h * rule.nodes[k]);
    }
    total += 0.5 * h * part;
  }
  return total;
}

}  // namespace tivstat
