#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tivstat/random.hpp"
#include "tivstat/spectra.hpp"

namespace tivstat {

// Crossover strength xi (in units of the mean level spacing at band centre)
// for an n x n matrix. The matrix coupling is lambda = pi xi / sqrt(n).
struct CrossoverParams {
  double xi = 0.0;
  std::size_t n = 2;

  void validate() const;
  double lambda() const;
};

// H = A + iB with A real symmetric and B real antisymmetric (zero diagonal).
// Both parts are stored densely, row-major.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(std::size_t n);
  HermitianMatrix(std::size_t n, std::vector<double> real_part, std::vector<double> imag_part);

  std::size_t dim() const { return n_; }
  double re(std::size_t i, std::size_t j) const { return real_[i * n_ + j]; }
  double im(std::size_t i, std::size_t j) const { return imag_[i * n_ + j]; }

  // Sets H_ij = re + i im and H_ji = re - i im.
  void set(std::size_t i, std::size_t j, double re, double im);

  std::span<const double> real_part() const { return real_; }
  std::span<const double> imag_part() const { return imag_; }

  bool is_hermitian() const;

 private:
  std::size_t n_;
  std::vector<double> real_;
  std::vector<double> imag_;
};

HermitianMatrix sample_crossover_matrix(const CrossoverParams& params, RandomStream& rng);

// All 2n eigenvalues (ascending) of the real-symmetric embedding
// [[A, -B], [B, A]].
std::vector<double> embedding_eigenvalues(const HermitianMatrix& h);

// Eigenvalues of H (ascending), from the embedding with its doubled pairs
// collapsed.
std::vector<double> hermitian_eigenvalues(const HermitianMatrix& h);

inline constexpr double kPairTolerance = 1e-8;

// The central ceil(fraction * n) values.
std::vector<double> bulk_select(std::span<const double> eigenvalues, double bulk_fraction);

enum class SimulationUnfolding { Polynomial, Semicircle };

struct EnsembleConfig {
  std::size_t n = 700;
  std::size_t count = 300;
  double xi = 0.0;
  double phi = 1.0;
  double bulk_fraction = 0.6;
  std::uint64_t seed = 1;
  SimulationUnfolding unfolding = SimulationUnfolding::Polynomial;
  int polynomial_degree = 7;
  // Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;

  void validate() const;
};

// One realization: sample, diagonalize, select the bulk, unfold, decimate.
UnfoldedSpectrum simulate_realization(const EnsembleConfig& config, std::size_t index);

// Realization r uses RandomStream::substream(config.seed, r); output order
// matches the realization index whatever the thread schedule.
std::vector<UnfoldedSpectrum> generate_ensemble(const EnsembleConfig& config);

}  // namespace tivstat
