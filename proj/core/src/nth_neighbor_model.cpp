#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <tuple>

#include "tivstat/error.hpp"
#include "tivstat/estimators.hpp"
#include "tivstat/fitting.hpp"
#include "tivstat/theory.hpp"

namespace tivstat {

namespace {

using ModelKey = std::tuple<double, std::size_t, std::size_t, double, std::uint64_t, int, int>;

ModelKey key_of(double xi, const EnsembleConfig& c) {
  return {xi, c.n, c.count, c.bulk_fraction, c.seed, static_cast<int>(c.unfolding), c.polynomial_degree};
}

struct ModelCache {
  std::shared_mutex mutex;
  std::map<ModelKey, NthNeighborModel> models;
};

ModelCache& model_cache() {
  static ModelCache cache;
  return cache;
}

}  // namespace

NthNeighborModel build_nth_neighbor_model(double xi, const EnsembleConfig& sim_config) {
  if (sim_config.xi != xi) throw DomainError("build_nth_neighbor_model: simulation xi differs from the model xi");
  if (sim_config.phi != 1.0) throw DomainError("build_nth_neighbor_model: the model needs complete spectra (phi=1)");
  if (!(xi >= 0.0) || xi > kMaxTheoryXi) throw DomainError("build_nth_neighbor_model: xi outside the theory range");

  const ModelKey key = key_of(xi, sim_config);
  auto& cache = model_cache();
  {
    std::shared_lock lock(cache.mutex);
    auto it = cache.models.find(key);
    if (it != cache.models.end()) return it->second;
  }

  const std::vector<UnfoldedSpectrum> spectra = generate_ensemble(sim_config);
  NthNeighborModel model;
  model.xi = xi;
  for (int n = 1; n <= 2; ++n) {
    const SpacingSample sample = pooled_spacings(spectra, n + 1);
    const StatCurve histogram = spacing_histogram(sample, kModelBinWidth);
    model.fitted[static_cast<std::size_t>(n - 1)] = fit_ptilde(histogram, static_cast<double>(n + 1)).params;
  }

  std::unique_lock lock(cache.mutex);
  cache.models.emplace(key, model);
  return model;
}

}  // namespace tivstat
