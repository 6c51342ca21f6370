#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "tivstat/error.hpp"

#ifndef TIVSTAT_VERSION
#define TIVSTAT_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace tivstat::cli;

namespace {

struct Options {
  SimulateOptions simulate;
  AnalyzeOptions analyze;
  TheoryOptions theory;
  FitOptions fit_phi;
  FitOptions fit_xi;
  UnfoldOptions unfold;
  CrosscorrOptions crosscorr;
  fs::path replay_manifest;
  std::optional<fs::path> replay_out;
};

void add_geometry(CLI::App* app, GeometryOptions& g) {
  app->add_option("--area", g.area, "Billiard area in m^2")->capture_default_str();
  app->add_option("--perimeter", g.perimeter, "Billiard perimeter in m")->capture_default_str();
  app->add_option("--sign", g.sign, "Sign of the perimeter term")
      ->check(CLI::IsMember({"minus", "plus"}))
      ->capture_default_str();
  app->add_flag("--calibrate", g.calibrate, "Shift the Weyl constant so the lowest level maps to 0.5");
}

void add_out(CLI::App* app, fs::path& out) {
  app->add_option("--out", out, "Output directory (default: stdout)");
}

void build(CLI::App& app, Options& o) {
  app.require_subcommand(1);
  app.set_version_flag("--version", TIVSTAT_VERSION);

  auto* sim = app.add_subcommand("simulate", "Sample crossover spectra and write unfolded level files");
  auto& s = o.simulate;
  sim->add_option("--n", s.n, "Matrix dimension")->capture_default_str();
  sim->add_option("--count", s.count, "Number of realizations")->capture_default_str();
  sim->add_option("--xi", s.xi, "Crossover parameter")->capture_default_str();
  sim->add_option("--phi", s.phi, "Fraction of levels kept")->capture_default_str();
  sim->add_option("--seed", s.seed, "Master seed")->capture_default_str();
  sim->add_option("--bulk", s.bulk, "Central fraction of the spectrum kept")->capture_default_str();
  sim->add_option("--unfolding", s.unfolding, "polynomial or semicircle")
      ->check(CLI::IsMember({"polynomial", "semicircle"}))
      ->capture_default_str();
  sim->add_option("--degree", s.degree, "Polynomial unfolding degree")->capture_default_str();
  sim->add_option("--threads", s.threads, "Worker threads, 0 for all cores")->capture_default_str();
  sim->add_option("--out", s.out, "Output directory")->required();

  auto* an = app.add_subcommand("analyze", "Fluctuation statistics of a set of level files");
  auto& a = o.analyze;
  an->add_option("--in", a.in, "Glob of level files")->required();
  an->add_option("--unit", a.unit, "Level unit of the inputs")
      ->check(CLI::IsMember({"unfolded", "ghz"}))
      ->required();
  an->add_option("--stats", a.stats, "Comma-separated subset of nn,sigma2,delta3,power")->capture_default_str();
  an->add_option("--nn-bin", a.nn_bin, "Spacing histogram bin width")->capture_default_str();
  an->add_option("--lgrid", a.lgrid, "Window lengths start:stop:step")->capture_default_str();
  an->add_option("--ncommon", a.ncommon, "Power spectrum sequence length, AUTO for the shortest input")
      ->capture_default_str();
  an->add_option("--power-scaling", a.scaling, "unit rescales each window to unit mean spacing, none leaves it")
      ->check(CLI::IsMember({"unit", "none"}))
      ->capture_default_str();
  an->add_option("--xi", a.xi, "xi recorded in the CSV header");
  an->add_option("--phi", a.phi, "phi recorded in the CSV header");
  add_geometry(an, a.geometry);
  add_out(an, a.out);

  auto* th = app.add_subcommand("theory", "Evaluate a theory curve on a grid");
  auto& t = o.theory;
  th->add_option("--xi", t.xi, "Crossover parameter")->capture_default_str();
  th->add_option("--phi", t.phi, "Fraction of levels kept")->capture_default_str();
  th->add_option("--curve", t.curve, "ps, sigma2, delta3, power, y2 or K")
      ->check(CLI::IsMember({"ps", "sigma2", "delta3", "power", "y2", "K"}))
      ->required();
  th->add_option("--grid", t.grid, "Abscissae start:stop:step")->required();
  th->add_option("--model-n", t.model_n, "Matrix dimension of the neighbour model (ps with phi < 1)")
      ->capture_default_str();
  th->add_option("--model-count", t.model_count, "Realizations of the neighbour model")->capture_default_str();
  th->add_option("--model-seed", t.model_seed, "Seed of the neighbour model");
  add_out(th, t.out);

  auto* fit = app.add_subcommand("fit", "Fit phi or xi to an empirical curve");
  fit->require_subcommand(1);
  auto* fp = fit->add_subcommand("phi", "Fit phi to a power spectrum at fixed xi");
  auto& p = o.fit_phi;
  p.what = "phi";
  fp->add_option("--power", p.data, "Power spectrum CSV")->required()->check(CLI::ExistingFile);
  fp->add_option("--xi", p.xi, "Crossover parameter")->required();
  fp->add_option("--range", p.range, "Fit window in t, lo:hi (default 0.02:0.3)");
  fp->add_option("--bounds", p.bounds, "Search interval for phi (default 0.4:1)");
  fp->add_option("--step", p.step, "Search grid step (default 0.005)");
  add_out(fp, p.out);
  auto* fx = fit->add_subcommand("xi", "Fit xi to a number variance at fixed phi");
  auto& x = o.fit_xi;
  x.what = "xi";
  fx->add_option("--sigma2", x.data, "Number variance CSV")->required()->check(CLI::ExistingFile);
  fx->add_option("--phi", x.phi, "Fraction of levels kept")->required();
  fx->add_option("--range", x.range, "Fit window in L, lo:hi (default 0.5:5)");
  fx->add_option("--bounds", x.bounds, "Search interval for xi (default 0:1)");
  fx->add_option("--step", x.step, "Search grid step (default 0.01)");
  add_out(fx, x.out);

  auto* un = app.add_subcommand("unfold", "Unfold measured eigenfrequencies with Weyl's law");
  auto& u = o.unfold;
  un->add_option("--in", u.in, "Level file in GHz")->required()->check(CLI::ExistingFile);
  un->add_option("--unit", u.unit, "Unit of the input")->check(CLI::IsMember({"ghz"}))->capture_default_str();
  add_geometry(un, u.geometry);
  add_out(un, u.out);

  auto* cc = app.add_subcommand("crosscorr", "Windowed cross-correlation of S12 and S21");
  auto& c = o.crosscorr;
  cc->add_option("--in", c.in, "S-parameter CSV")->required()->check(CLI::ExistingFile);
  cc->add_option("--window", c.window, "Window width in GHz")->capture_default_str();
  add_out(cc, c.out);

  auto* rp = app.add_subcommand("replay", "Re-run a command from its manifest");
  rp->add_option("--manifest", o.replay_manifest, "manifest.json of an earlier run")
      ->required()
      ->check(CLI::ExistingFile);
  rp->add_option("--out", o.replay_out, "Write to this directory instead of the recorded one");
}

// Effective value of every option, given or defaulted.
ordered_json flag_set(const CLI::App* sub) {
  ordered_json flags = ordered_json::object();
  for (const auto* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->get_type_size() == 0) {
      flags[name] = opt->count() > 0;
    } else if (opt->count() > 0) {
      flags[name] = opt->as<std::string>();
    } else if (!opt->get_default_str().empty()) {
      flags[name] = opt->get_default_str();
    } else {
      flags[name] = nullptr;
    }
  }
  return flags;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const fs::path& out_dir, const std::string& subcommand, const std::vector<std::string>& argv,
                    const ordered_json& flags, const std::vector<std::string>& outputs, double seconds,
                    const Options& o) {
  ordered_json m;
  m["subcommand"] = subcommand;
  m["argv"] = argv;
  m["flags"] = flags;
  m["version"] = TIVSTAT_VERSION;
  if (subcommand == "simulate") {
    const auto& s = o.simulate;
    m["seed"] = s.seed;
    m["n"] = s.n;
    m["count"] = s.count;
    m["xi"] = s.xi;
    m["phi"] = s.phi;
    m["bulk_fraction"] = s.bulk;
    m["unfolding"] = s.unfolding;
  } else if (subcommand == "theory" && o.theory.model_seed) {
    m["seed"] = *o.theory.model_seed;
  } else {
    m["seed"] = nullptr;
  }
  m["outputs"] = outputs;
  m["finished_utc"] = utc_now();
  m["wall_clock_seconds"] = seconds;
  std::ofstream f(out_dir / "manifest.json");
  if (!f) throw tivstat::DataError("cannot write " + (out_dir / "manifest.json").string());
  f << m.dump(2) << '\n';
}

int run(const std::vector<std::string>& args, bool replaying);

// Rebuilds the command line from a manifest, optionally redirecting --out.
std::vector<std::string> replay_args(const fs::path& manifest, const std::optional<fs::path>& out) {
  std::ifstream f(manifest);
  if (!f) throw tivstat::DataError("cannot read " + manifest.string());
  ordered_json m;
  try {
    m = ordered_json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw tivstat::DataError(manifest.string() + ": " + e.what());
  }
  if (!m.contains("argv") || !m["argv"].is_array()) throw tivstat::DataError(manifest.string() + ": no argv array");
  std::vector<std::string> args = m["argv"].get<std::vector<std::string>>();
  if (out) {
    bool replaced = false;
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--out") {
        args[i + 1] = out->string();
        replaced = true;
      }
    }
    if (!replaced) {
      args.push_back("--out");
      args.push_back(out->string());
    }
  }
  return args;
}

int run(const std::vector<std::string>& args, bool replaying) {
  CLI::App app{"Missing-level statistics for the GOE to GUE crossover", "tivstat"};
  Options o;
  build(app, o);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  std::string name = sub->get_name();
  if (name == "replay") {
    if (replaying) throw UsageError("a manifest cannot replay another manifest");
    return run(replay_args(o.replay_manifest, o.replay_out), true);
  }
  if (name == "fit") {
    sub = sub->get_subcommands().front();
    name = "fit " + sub->get_name();
  }

  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> written;
  fs::path out;
  if (name == "simulate") {
    written = run_simulate(o.simulate);
    out = o.simulate.out;
  } else if (name == "analyze") {
    written = run_analyze(o.analyze);
    out = o.analyze.out;
  } else if (name == "theory") {
    written = run_theory(o.theory);
    out = o.theory.out;
  } else if (name == "fit phi") {
    written = run_fit(o.fit_phi);
    out = o.fit_phi.out;
  } else if (name == "fit xi") {
    written = run_fit(o.fit_xi);
    out = o.fit_xi.out;
  } else if (name == "unfold") {
    written = run_unfold(o.unfold);
    out = o.unfold.out;
  } else {
    written = run_crosscorr(o.crosscorr);
    out = o.crosscorr.out;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out.empty()) write_manifest(out, name, args, flag_set(sub), written, seconds, o);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(args, false);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const tivstat::DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
