#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tivstat/spectra.hpp"
#include "tivstat/stat_curve.hpp"

namespace tivstat::io {

// Shortest representation that round-trips to the same double.
std::string format_double(double v);

// Level files: one decimal number per line; '#' starts a comment.
std::vector<double> read_levels(std::istream& in, const std::string& source = "<stream>");
std::vector<double> read_levels(const std::filesystem::path& path);
void write_levels(std::ostream& out, std::span<const double> levels, const std::string& comment = {});
void write_levels(const std::filesystem::path& path, std::span<const double> levels, const std::string& comment = {});

// CSV with header freq_ghz,re_s12,im_s12,re_s21,im_s21.
SParameterTrace read_sparameters(std::istream& in, const std::string& source = "<stream>");
SParameterTrace read_sparameters(const std::filesystem::path& path);
void write_sparameters(std::ostream& out, const SParameterTrace& trace);

// "# kind=..., xi=..., phi=..., n_spectra=..." then "x,y,yerr" rows. Unknown
// parameters are written as '?', a missing error as an empty field.
void write_stat_curve(std::ostream& out, const StatCurve& curve);
void write_stat_curve(const std::filesystem::path& path, const StatCurve& curve);
StatCurve read_stat_curve(std::istream& in, const std::string& source = "<stream>");
StatCurve read_stat_curve(const std::filesystem::path& path);

}  // namespace tivstat::io
