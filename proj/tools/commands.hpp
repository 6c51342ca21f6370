#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tivstat::cli {

// Thrown for flag values that are well-formed but unusable together.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimulateOptions {
  std::size_t n = 700;
  std::size_t count = 300;
  double xi = 0.0;
  double phi = 1.0;
  std::uint64_t seed = 1;
  double bulk = 0.6;
  std::string unfolding = "polynomial";
  int degree = 7;
  unsigned threads = 0;
  std::filesystem::path out;
};

struct GeometryOptions {
  double area = 0.18285;
  double perimeter = 2.023;
  std::string sign = "minus";
  bool calibrate = false;
};

struct AnalyzeOptions {
  std::string in;
  std::string unit;
  std::string stats = "nn,sigma2,delta3,power";
  double nn_bin = 0.2;
  std::string lgrid = "0.5:10:0.25";
  std::string ncommon = "AUTO";
  std::string scaling = "unit";
  std::optional<double> xi;
  std::optional<double> phi;
  GeometryOptions geometry;
  std::filesystem::path out;
};

struct TheoryOptions {
  double xi = 0.0;
  double phi = 1.0;
  std::string curve;
  std::string grid;
  std::size_t model_n = 500;
  std::size_t model_count = 500;
  std::optional<std::uint64_t> model_seed;
  std::filesystem::path out;
};

struct FitOptions {
  std::string what;  // "phi" or "xi"
  std::filesystem::path data;
  double xi = 0.0;
  double phi = 1.0;
  std::optional<std::string> range;
  std::optional<std::string> bounds;
  std::optional<double> step;
  std::filesystem::path out;
};

struct UnfoldOptions {
  std::filesystem::path in;
  std::string unit = "ghz";
  GeometryOptions geometry;
  std::filesystem::path out;
};

struct CrosscorrOptions {
  std::filesystem::path in;
  double window = 1.0;
  std::filesystem::path out;
};

// Each command returns the files it wrote, relative to its output directory
// when one was given, and prints its primary result to stdout otherwise.
std::vector<std::string> run_simulate(const SimulateOptions& o);
std::vector<std::string> run_analyze(const AnalyzeOptions& o);
std::vector<std::string> run_theory(const TheoryOptions& o);
std::vector<std::string> run_fit(const FitOptions& o);
std::vector<std::string> run_unfold(const UnfoldOptions& o);
std::vector<std::string> run_crosscorr(const CrosscorrOptions& o);

// "a:b:h" -> inclusive grid; "a:b" -> pair.
std::vector<double> parse_grid(const std::string& spec);
std::pair<double, double> parse_range(const std::string& spec);

}  // namespace tivstat::cli
