#include "tivstat/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "tivstat/error.hpp"

namespace tivstat::io {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void parse_failure(const std::string& source, std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << source << ":" << line << ": " << what;
  throw DataError(os.str());
}

double parse_number(const std::string& field, const std::string& source, std::size_t line) {
  const std::string t = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    parse_failure(source, line, "not a number: '" + t + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::string optional_value(const std::optional<double>& v) { return v ? format_double(*v) : "?"; }

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw InternalError("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::vector<double> read_levels(std::istream& in, const std::string& source) {
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    out.push_back(parse_number(t, source, lineno));
  }
  return out;
}

std::vector<double> read_levels(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_levels(in, path.string());
}

void write_levels(std::ostream& out, std::span<const double> levels, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  for (double v : levels) out << format_double(v) << '\n';
}

void write_levels(const std::filesystem::path& path, std::span<const double> levels, const std::string& comment) {
  auto out = open_out(path);
  write_levels(out, levels, comment);
}

SParameterTrace read_sparameters(std::istream& in, const std::string& source) {
  SParameterTrace trace;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header) {
      std::string compact;
      for (char c : t) {
        if (c != ' ' && c != '\t') compact.push_back(c);
      }
      if (compact != "freq_ghz,re_s12,im_s12,re_s21,im_s21") {
        parse_failure(source, lineno, "expected header freq_ghz,re_s12,im_s12,re_s21,im_s21");
      }
      header = true;
      continue;
    }
    const auto f = split(t, ',');
    if (f.size() != 5) parse_failure(source, lineno, "expected 5 fields");
    trace.frequency_ghz.push_back(parse_number(f[0], source, lineno));
    trace.s12.emplace_back(parse_number(f[1], source, lineno), parse_number(f[2], source, lineno));
    trace.s21.emplace_back(parse_number(f[3], source, lineno), parse_number(f[4], source, lineno));
  }
  if (!header) parse_failure(source, lineno, "missing header");
  trace.validate();
  return trace;
}

SParameterTrace read_sparameters(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_sparameters(in, path.string());
}

void write_sparameters(std::ostream& out, const SParameterTrace& trace) {
  out << "freq_ghz,re_s12,im_s12,re_s21,im_s21\n";
  for (std::size_t i = 0; i < trace.frequency_ghz.size(); ++i) {
    out << format_double(trace.frequency_ghz[i]) << ',' << format_double(trace.s12[i].real()) << ','
        << format_double(trace.s12[i].imag()) << ',' << format_double(trace.s21[i].real()) << ','
        << format_double(trace.s21[i].imag()) << '\n';
  }
}

void write_stat_curve(std::ostream& out, const StatCurve& curve) {
  out << "# kind=" << curve.kind << ", xi=" << optional_value(curve.meta.xi)
      << ", phi=" << optional_value(curve.meta.phi) << ", n_spectra=" << curve.meta.n_spectra;
  if (curve.meta.bin_width) out << ", bin_width=" << format_double(*curve.meta.bin_width);
  out << "\nx,y,yerr\n";
  for (const auto& p : curve.points) {
    out << format_double(p.x) << ',' << format_double(p.y) << ',';
    if (p.y_err) out << format_double(*p.y_err);
    out << '\n';
  }
}

void write_stat_curve(const std::filesystem::path& path, const StatCurve& curve) {
  auto out = open_out(path);
  write_stat_curve(out, curve);
}

StatCurve read_stat_curve(std::istream& in, const std::string& source) {
  StatCurve curve;
  std::string line;
  std::size_t lineno = 0;
  bool columns = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      for (const auto& item : split(t.substr(1), ',')) {
        const std::string kv = trim(item);
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = trim(kv.substr(0, eq));
        const std::string value = trim(kv.substr(eq + 1));
        if (key == "kind") {
          curve.kind = value;
        } else if (value != "?" && (key == "xi" || key == "phi" || key == "bin_width")) {
          const double v = parse_number(value, source, lineno);
          if (key == "xi") curve.meta.xi = v;
          if (key == "phi") curve.meta.phi = v;
          if (key == "bin_width") curve.meta.bin_width = v;
        } else if (key == "n_spectra") {
          curve.meta.n_spectra = static_cast<std::size_t>(parse_number(value, source, lineno));
        }
      }
      continue;
    }
    if (!columns) {
      if (t != "x,y,yerr") parse_failure(source, lineno, "expected column header x,y,yerr");
      columns = true;
      continue;
    }
    const auto f = split(t, ',');
    if (f.size() != 3) parse_failure(source, lineno, "expected 3 fields");
    CurvePoint p{parse_number(f[0], source, lineno), parse_number(f[1], source, lineno), std::nullopt};
    if (!trim(f[2]).empty()) p.y_err = parse_number(f[2], source, lineno);
    curve.points.push_back(p);
  }
  if (!columns) parse_failure(source, lineno, "missing column header x,y,yerr");
  return curve;
}

StatCurve read_stat_curve(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_stat_curve(in, path.string());
}

}  // namespace tivstat::io
