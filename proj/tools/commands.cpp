#include "commands.hpp"

#include <glob.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tivstat/tivstat.hpp"

namespace tivstat::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

double to_double(const std::string& field, const std::string& context) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw UsageError(context + ": '" + field + "' is not a number");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(item);
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
}

BilliardGeometry make_geometry(const GeometryOptions& g) {
  BilliardGeometry geo{g.area, g.perimeter, PerimeterSign::Minus, 0.0};
  if (g.sign == "plus") {
    geo.perimeter_sign = PerimeterSign::Plus;
  } else if (g.sign != "minus") {
    throw UsageError("--sign must be minus or plus");
  }
  return geo;
}

// Unfolds GHz levels with Weyl's law, optionally calibrating the constant.
UnfoldedSpectrum weyl_unfold(const std::vector<double>& ghz, const GeometryOptions& g) {
  BilliardGeometry geo = make_geometry(g);
  LevelSequence levels(ghz, LevelUnit::FrequencyGHz);
  if (g.calibrate) geo.constant_offset = calibrated_weyl_offset(geo, levels.values().front());
  return unfold_weyl(levels, geo);
}

void write_json(const ordered_json& j, const fs::path& out_dir, const std::string& name,
                std::vector<std::string>& written) {
  const std::string text = j.dump(2) + "\n";
  if (out_dir.empty()) {
    std::cout << text;
    return;
  }
  ensure_dir(out_dir);
  std::ofstream f(out_dir / name);
  if (!f) throw DataError("cannot write " + (out_dir / name).string());
  f << text;
  written.push_back(name);
}

void emit_curve(const StatCurve& curve, const fs::path& out_dir, const std::string& name,
                std::vector<std::string>& written) {
  for (const auto& w : curve.warnings) std::cerr << "warning: " << w << '\n';
  if (out_dir.empty()) {
    io::write_stat_curve(std::cout, curve);
    return;
  }
  ensure_dir(out_dir);
  io::write_stat_curve(out_dir / name, curve);
  written.push_back(name);
}

std::vector<fs::path> expand_glob(const std::string& pattern) {
  glob_t g{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  std::vector<fs::path> out;
  if (rc == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  globfree(&g);
  if (rc != 0 && rc != GLOB_NOMATCH) throw DataError("glob failed for '" + pattern + "'");
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw UsageError("grid '" + spec + "' must have the form start:stop:step");
  const double a = to_double(parts[0], "grid");
  const double b = to_double(parts[1], "grid");
  const double h = to_double(parts[2], "grid");
  if (!(h > 0.0) || b < a) throw UsageError("grid '" + spec + "' needs step > 0 and stop >= start");
  return arange_inclusive(a, b, h);
}

std::pair<double, double> parse_range(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 2) throw UsageError("range '" + spec + "' must have the form lo:hi");
  return {to_double(parts[0], "range"), to_double(parts[1], "range")};
}

std::vector<std::string> run_simulate(const SimulateOptions& o) {
  EnsembleConfig c;
  c.n = o.n;
  c.count = o.count;
  c.xi = o.xi;
  c.phi = o.phi;
  c.seed = o.seed;
  c.bulk_fraction = o.bulk;
  c.polynomial_degree = o.degree;
  c.threads = o.threads;
  if (o.unfolding == "semicircle") {
    c.unfolding = SimulationUnfolding::Semicircle;
  } else if (o.unfolding != "polynomial") {
    throw UsageError("--unfolding must be polynomial or semicircle");
  }
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const auto spectra = generate_ensemble(c);

  ensure_dir(o.out);
  std::vector<std::string> written;
  const int width = std::max<int>(4, static_cast<int>(std::to_string(o.count - 1).size()));
  for (std::size_t r = 0; r < spectra.size(); ++r) {
    std::ostringstream name;
    name << "level_" << std::setw(width) << std::setfill('0') << r << ".lvl";
    std::ostringstream comment;
    comment << "realization " << r << ", " << spectra[r].provenance().describe() << ", unfolded";
    io::write_levels(o.out / name.str(), spectra[r].values(), comment.str());
    written.push_back(name.str());
  }
  std::cerr << "simulate: wrote " << spectra.size() << " spectra to " << o.out.string() << '\n';
  return written;
}

std::vector<std::string> run_analyze(const AnalyzeOptions& o) {
  if (o.unit != "unfolded" && o.unit != "ghz") throw UsageError("--unit must be unfolded or ghz");
  const std::set<std::string> known{"nn", "sigma2", "delta3", "power"};
  std::vector<std::string> stats;
  for (const auto& s : split(o.stats, ',')) {
    if (!known.count(s)) throw UsageError("unknown statistic '" + s + "' (expected nn, sigma2, delta3, power)");
    if (std::find(stats.begin(), stats.end(), s) == stats.end()) stats.push_back(s);
  }
  if (stats.empty()) throw UsageError("--stats is empty");
  if (!(o.nn_bin > 0.0)) throw UsageError("--nn-bin must be positive");
  const auto lgrid = parse_grid(o.lgrid);
  PowerWindowScaling scaling = PowerWindowScaling::UnitMeanSpacing;
  if (o.scaling == "none") {
    scaling = PowerWindowScaling::None;
  } else if (o.scaling != "unit") {
    throw UsageError("--power-scaling must be unit or none");
  }

  const auto files = expand_glob(o.in);
  if (files.empty()) throw DataError("no input files match '" + o.in + "'");
  std::vector<UnfoldedSpectrum> spectra;
  spectra.reserve(files.size());
  for (const auto& f : files) {
    auto values = io::read_levels(f);
    try {
      if (o.unit == "ghz") {
        spectra.push_back(weyl_unfold(values, o.geometry));
      } else {
        LevelSequence seq(values, LevelUnit::Unfolded);
        const auto n = values.size();
        spectra.emplace_back(std::move(values), Provenance{UnfoldingKind::Polynomial, 1.0}, n);
      }
    } catch (const DataError& e) {
      throw DataError(f.string() + ": " + e.what());
    }
  }

  CurveMeta meta;
  meta.xi = o.xi;
  meta.phi = o.phi;
  meta.n_spectra = spectra.size();
  std::vector<std::string> written;
  for (const auto& s : stats) {
    StatCurve curve;
    if (s == "nn") {
      curve = spacing_histogram(pooled_spacings(spectra, 1), o.nn_bin);
    } else if (s == "sigma2") {
      curve = number_variance(spectra, lgrid);
    } else if (s == "delta3") {
      curve = rigidity(spectra, lgrid);
    } else {
      std::size_t n_common = spectra.front().size();
      for (const auto& sp : spectra) n_common = std::min(n_common, sp.size());
      if (o.ncommon != "AUTO") {
        const double v = to_double(o.ncommon, "--ncommon");
        if (!(v >= 2.0) || v != std::floor(v)) throw UsageError("--ncommon must be AUTO or an integer >= 2");
        n_common = static_cast<std::size_t>(v);
      }
      curve = power_spectrum(spectra, n_common, scaling);
    }
    const auto bin = curve.meta.bin_width;
    curve.meta = meta;
    curve.meta.bin_width = bin;
    emit_curve(curve, o.out, s + ".csv", written);
  }
  return written;
}

std::vector<std::string> run_theory(const TheoryOptions& o) {
  const auto grid = parse_grid(o.grid);
  if (!(o.xi >= 0.0) || o.xi > kMaxTheoryXi) throw UsageError("--xi outside [0, 1.5]");
  if (!(o.phi > 0.0) || o.phi > 1.0) throw UsageError("--phi outside (0, 1]");

  StatCurve curve;
  curve.kind = "theory_" + o.curve;
  curve.meta.xi = o.xi;
  curve.meta.phi = o.phi;
  std::optional<NthNeighborModel> model;
  if (o.curve == "ps" && o.phi < 1.0) {
    EnsembleConfig mc = default_model_config(o.xi);
    mc.n = o.model_n;
    mc.count = o.model_count;
    if (o.model_seed) mc.seed = *o.model_seed;
    model = build_nth_neighbor_model(o.xi, mc);
  }
  const std::set<std::string> curves{"ps", "sigma2", "delta3", "power", "y2", "K"};
  if (!curves.count(o.curve)) throw UsageError("unknown curve '" + o.curve + "' (ps, sigma2, delta3, power, y2, K)");

  for (double x : grid) {
    double y = 0.0;
    if (o.curve == "ps") {
      if (x < 0.0) throw UsageError("ps grid must be non-negative");
      y = model ? missing_spacing_pdf(x, o.xi, o.phi, *model) : crossover_spacing_pdf(x, o.xi);
    } else if (o.curve == "sigma2") {
      if (x < 0.0) throw UsageError("sigma2 grid must be non-negative");
      y = missing_sigma2(x, o.xi, o.phi);
    } else if (o.curve == "delta3") {
      if (!(x > 0.0)) {
        curve.warnings.push_back("delta3: skipped L=" + io::format_double(x) + " (needs L > 0)");
        continue;
      }
      y = missing_delta3(x, o.xi, o.phi);
    } else if (o.curve == "power") {
      if (!(x > 0.0) || !(x < 1.0)) {
        curve.warnings.push_back("power: skipped singular point t=" + io::format_double(x));
        continue;
      }
      y = missing_power_spectrum(x, o.xi, o.phi);
    } else if (o.curve == "y2") {
      y = cluster_y2(x, o.xi);
    } else {
      if (x < 0.0 || x > 1.0) throw UsageError("K grid must lie in [0, 1]");
      y = form_factor_k(x, o.xi);
    }
    curve.points.push_back({x, y, std::nullopt});
  }
  std::vector<std::string> written;
  emit_curve(curve, o.out, "theory_" + o.curve + ".csv", written);
  return written;
}

std::vector<std::string> run_fit(const FitOptions& o) {
  const StatCurve data = io::read_stat_curve(o.data);
  FitResult r;
  if (o.what == "phi") {
    PhiFitOptions po;
    if (o.range) po.range = parse_range(*o.range);
    if (o.bounds) po.bounds = parse_range(*o.bounds);
    if (o.step) po.grid_step = *o.step;
    if (!(po.grid_step > 0.0)) throw UsageError("--step must be positive");
    try {
      r = fit_phi(data, o.xi, po);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  } else {
    XiFitOptions xo;
    if (o.range) xo.range = parse_range(*o.range);
    if (o.bounds) xo.bounds = parse_range(*o.bounds);
    if (o.step) xo.grid_step = *o.step;
    if (!(xo.grid_step > 0.0)) throw UsageError("--step must be positive");
    try {
      r = fit_xi(data, o.phi, xo);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  ordered_json j;
  j["parameter"] = o.what;
  j["estimate"] = r.estimate;
  j["stderr"] = r.standard_error;
  j["objective"] = r.objective;
  j["range"] = {r.range.first, r.range.second};
  j["bounds"] = {r.bounds.first, r.bounds.second};
  j["points"] = r.points;
  j["at_boundary"] = r.at_boundary;
  j["warnings"] = r.warnings;
  std::vector<std::string> written;
  write_json(j, o.out, "fit_" + o.what + ".json", written);
  return written;
}

std::vector<std::string> run_unfold(const UnfoldOptions& o) {
  if (o.unit != "ghz") throw UsageError("unfold reads eigenfrequencies; --unit must be ghz");
  const auto levels = io::read_levels(o.in);
  const auto unfolded = weyl_unfold(levels, o.geometry);
  std::ostringstream comment;
  comment << "weyl unfolding of " << o.in.filename().string() << ", area=" << io::format_double(o.geometry.area)
          << ", perimeter=" << io::format_double(o.geometry.perimeter) << ", sign=" << o.geometry.sign;
  std::vector<std::string> written;
  if (o.out.empty()) {
    io::write_levels(std::cout, unfolded.values(), comment.str());
  } else {
    ensure_dir(o.out);
    const std::string name = o.in.stem().string() + ".unfolded.lvl";
    io::write_levels(o.out / name, unfolded.values(), comment.str());
    written.push_back(name);
  }
  std::cerr << "unfold: " << unfolded.size() << " levels, mean spacing " << unfolded.mean_spacing() << '\n';
  return written;
}

std::vector<std::string> run_crosscorr(const CrosscorrOptions& o) {
  const auto trace = io::read_sparameters(o.in);
  std::vector<WindowCoefficient> windows;
  try {
    windows = cross_correlation(trace, o.window);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  ordered_json j;
  j["window_ghz"] = o.window;
  j["windows"] = ordered_json::array();
  for (const auto& w : windows) {
    j["windows"].push_back(
        {{"start_ghz", w.start_ghz}, {"stop_ghz", w.stop_ghz}, {"points", w.points}, {"coefficient", w.coefficient}});
  }
  std::vector<std::string> written;
  write_json(j, o.out, "crosscorr.json", written);
  return written;
}

}  // namespace tivstat::cli
