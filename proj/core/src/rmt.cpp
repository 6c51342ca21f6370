#include "tivstat/rmt.hpp"

#include <lapacke.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "tivstat/error.hpp"

namespace tivstat {

void CrossoverParams::validate() const {
  if (!(xi >= 0.0) || !std::isfinite(xi)) throw DomainError("crossover: xi must be finite and non-negative");
  if (n < 2) throw DomainError("crossover: matrix dimension must be at least 2");
}

double CrossoverParams::lambda() const { return std::numbers::pi * xi / std::sqrt(static_cast<double>(n)); }

HermitianMatrix::HermitianMatrix(std::size_t n) : n_(n), real_(n * n, 0.0), imag_(n * n, 0.0) {}

HermitianMatrix::HermitianMatrix(std::size_t n, std::vector<double> real_part, std::vector<double> imag_part)
    : n_(n), real_(std::move(real_part)), imag_(std::move(imag_part)) {
  if (real_.size() != n * n || imag_.size() != n * n) throw DomainError("HermitianMatrix: storage size mismatch");
  if (!is_hermitian()) throw DomainError("HermitianMatrix: parts are not symmetric/antisymmetric");
}

void HermitianMatrix::set(std::size_t i, std::size_t j, double re, double im) {
  if (i == j && im != 0.0) throw DomainError("HermitianMatrix: diagonal must be real");
  real_[i * n_ + j] = re;
  real_[j * n_ + i] = re;
  imag_[i * n_ + j] = im;
  imag_[j * n_ + i] = -im;
}

bool HermitianMatrix::is_hermitian() const {
  for (std::size_t i = 0; i < n_; ++i) {
    if (imag_[i * n_ + i] != 0.0) return false;
    for (std::size_t j = 0; j < i; ++j) {
      if (real_[i * n_ + j] != real_[j * n_ + i]) return false;
      if (imag_[i * n_ + j] != -imag_[j * n_ + i]) return false;
    }
  }
  return true;
}

HermitianMatrix sample_crossover_matrix(const CrossoverParams& params, RandomStream& rng) {
  params.validate();
  const std::size_t n = params.n;
  const double lambda = params.lambda();
  HermitianMatrix h(n);
  // Fixed draw order: diagonal, then upper triangle row by row (symmetric
  // part then antisymmetric part).
  for (std::size_t i = 0; i < n; ++i) h.set(i, i, rng.normal(std::numbers::sqrt2), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = rng.normal();
      const double a = rng.normal();
      h.set(i, j, s, lambda * a);
    }
  }
  return h;
}

std::vector<double> embedding_eigenvalues(const HermitianMatrix& h) {
  const std::size_t n = h.dim();
  const std::size_t m = 2 * n;
  std::vector<double> a(m * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double re = h.re(i, j);
      const double im = h.im(i, j);
      if (!std::isfinite(re) || !std::isfinite(im)) throw DomainError("hermitian_eigenvalues: non-finite matrix entry");
      a[i * m + j] = re;
      a[(i + n) * m + j + n] = re;
      a[i * m + j + n] = -im;
      a[(i + n) * m + j] = im;
    }
  }
  // Divide and conquer; the QL iteration of Eigen's solver occasionally stalls
  // on the exactly doubled spectrum of the embedding.
  std::vector<double> w(m);
  const auto dim = static_cast<lapack_int>(m);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'N', 'U', dim, a.data(), dim, w.data());
  if (info != 0) {
    std::ostringstream os;
    os << "hermitian_eigenvalues: dsyevd failed (info " << info << ")";
    throw NumericalError(os.str());
  }
  std::sort(w.begin(), w.end());
  return w;
}

std::vector<double> hermitian_eigenvalues(const HermitianMatrix& h) {
  const std::vector<double> doubled = embedding_eigenvalues(h);
  double radius = 0.0;
  for (double e : doubled) radius = std::max(radius, std::abs(e));
  const double tol = kPairTolerance * std::max(radius, 1e-300);

  std::vector<double> out;
  out.reserve(h.dim());
  for (std::size_t k = 0; k < h.dim(); ++k) {
    const double a = doubled[2 * k];
    const double b = doubled[2 * k + 1];
    if (b - a > tol) {
      std::ostringstream os;
      os << "hermitian_eigenvalues: embedding pair " << k << " split by " << (b - a) << " (tolerance " << tol
         << ")";
      throw NumericalError(os.str());
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

std::vector<double> bulk_select(std::span<const double> eigenvalues, double bulk_fraction) {
  if (!(bulk_fraction > 0.0) || bulk_fraction > 1.0) throw DomainError("bulk_select: fraction must lie in (0, 1]");
  const std::size_t n = eigenvalues.size();
  const auto keep = std::min(n, static_cast<std::size_t>(std::ceil(bulk_fraction * static_cast<double>(n) - 1e-9)));
  if (keep == 0) throw DataError("bulk_select: empty selection");
  const std::size_t start = (n - keep) / 2;
  return {eigenvalues.begin() + static_cast<std::ptrdiff_t>(start),
          eigenvalues.begin() + static_cast<std::ptrdiff_t>(start + keep)};
}

void EnsembleConfig::validate() const {
  CrossoverParams{xi, n}.validate();
  if (count < 1) throw DomainError("ensemble: count must be at least 1");
  if (!(phi > 0.0) || phi > 1.0) throw DomainError("ensemble: phi must lie in (0, 1]");
  if (!(bulk_fraction > 0.0) || bulk_fraction > 1.0) throw DomainError("ensemble: bulk fraction must lie in (0, 1]");
  if (unfolding == SimulationUnfolding::Polynomial && (polynomial_degree < 3 || polynomial_degree > 15)) {
    throw DomainError("ensemble: polynomial degree must lie in [3, 15]");
  }
}

UnfoldedSpectrum simulate_realization(const EnsembleConfig& config, std::size_t index) {
  RandomStream rng = RandomStream::substream(config.seed, index);
  const CrossoverParams params{config.xi, config.n};
  const HermitianMatrix h = sample_crossover_matrix(params, rng);
  const std::vector<double> eigs = hermitian_eigenvalues(h);
  LevelSequence bulk(bulk_select(eigs, config.bulk_fraction), LevelUnit::RawEigenvalue);

  std::optional<UnfoldedSpectrum> unfolded;
  if (config.unfolding == SimulationUnfolding::Polynomial) {
    unfolded.emplace(unfold_polynomial(bulk, config.polynomial_degree));
  } else {
    const double lambda = params.lambda();
    const double radius = 2.0 * std::sqrt(static_cast<double>(config.n) * (1.0 + lambda * lambda));
    unfolded.emplace(unfold_semicircle(bulk, config.n, radius));
  }
  return decimate(*unfolded, config.phi, rng);
}

std::vector<UnfoldedSpectrum> generate_ensemble(const EnsembleConfig& config) {
  config.validate();
  std::vector<std::optional<UnfoldedSpectrum>> slots(config.count);
  std::vector<std::exception_ptr> errors(config.count);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t r = next.fetch_add(1); r < config.count; r = next.fetch_add(1)) {
      try {
        slots[r].emplace(simulate_realization(config, r));
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };

  unsigned threads = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.count));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t r = 0; r < config.count; ++r) {
    if (!errors[r]) continue;
    try {
      std::rethrow_exception(errors[r]);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "realization " << r << ": " << e.what();
      if (dynamic_cast<const DomainError*>(&e)) throw DomainError(os.str());
      if (dynamic_cast<const DataError*>(&e)) throw DataError(os.str());
      throw NumericalError(os.str());
    }
  }

  std::vector<UnfoldedSpectrum> out;
  out.reserve(config.count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace tivstat
