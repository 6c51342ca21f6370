#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>

#include "tivstat/error.hpp"
#include "tivstat/io.hpp"

using namespace tivstat;

namespace {

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("doubles round-trip through their text form") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 7.0}) {
    CHECK(std::stod(io::format_double(v)) == v);
  }
  CHECK(io::format_double(7.0) == "7");
}

TEST_CASE("level files") {
  const std::vector<double> levels{6.51, 6.5234567890123, 7.0, 1e-3};
  std::stringstream ss;
  io::write_levels(ss, levels, "four levels");
  CHECK(ss.str().rfind("# four levels\n", 0) == 0);
  CHECK(io::read_levels(ss) == levels);

  std::istringstream with_comments("# header\n\n 1.5  # trailing\n2.5\n");
  CHECK(io::read_levels(with_comments) == std::vector<double>{1.5, 2.5});

  std::istringstream bad("1.0\n2.0\nabc\n");
  const auto msg = message_of([&] { io::read_levels(bad, "x.lvl"); });
  CHECK(msg.find("x.lvl:3") != std::string::npos);

  const auto path = std::filesystem::temp_directory_path() / "tivstat_io_levels.lvl";
  io::write_levels(path, levels);
  CHECK(io::read_levels(path) == levels);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(io::read_levels(std::filesystem::path("/nonexistent/dir/file.lvl")), DataError);
}

TEST_CASE("S-parameter files") {
  SParameterTrace t;
  t.frequency_ghz = {6.5, 6.501, 6.502};
  t.s12 = {{0.1, -0.2}, {0.3, 0.4}, {-0.5, 0.6}};
  t.s21 = {{0.11, -0.21}, {0.31, 0.41}, {-0.51, 0.61}};
  std::stringstream ss;
  io::write_sparameters(ss, t);
  const auto back = io::read_sparameters(ss);
  CHECK(back.frequency_ghz == t.frequency_ghz);
  CHECK(back.s12 == t.s12);
  CHECK(back.s21 == t.s21);

  std::istringstream no_header("6.5,1,2,3,4\n");
  CHECK(message_of([&] { io::read_sparameters(no_header, "s.csv"); }).find("s.csv:1") != std::string::npos);
  std::istringstream short_row("freq_ghz,re_s12,im_s12,re_s21,im_s21\n6.5,1,2,3,4\n6.6,1,2\n");
  CHECK(message_of([&] { io::read_sparameters(short_row, "s.csv"); }).find("s.csv:3") != std::string::npos);
  std::istringstream not_sorted("freq_ghz,re_s12,im_s12,re_s21,im_s21\n6.6,1,2,3,4\n6.5,1,2,3,4\n");
  CHECK_THROWS_AS(io::read_sparameters(not_sorted), DataError);
}

TEST_CASE("stat curve files") {
  StatCurve c;
  c.kind = "sigma2";
  c.meta.xi = 0.35;
  c.meta.n_spectra = 300;
  c.points = {{0.5, 0.3, 0.01}, {1.0, 0.45, std::nullopt}};
  std::stringstream ss;
  io::write_stat_curve(ss, c);
  CHECK(ss.str().rfind("# kind=sigma2, xi=0.35, phi=?, n_spectra=300\nx,y,yerr\n", 0) == 0);
  const auto back = io::read_stat_curve(ss);
  CHECK(back.kind == "sigma2");
  CHECK(back.meta.xi == 0.35);
  CHECK_FALSE(back.meta.phi.has_value());
  CHECK(back.meta.n_spectra == 300);
  REQUIRE(back.points.size() == 2);
  CHECK(back.points[0].y_err == 0.01);
  CHECK_FALSE(back.points[1].y_err.has_value());

  c.meta.bin_width = 0.2;
  std::stringstream with_bin;
  io::write_stat_curve(with_bin, c);
  CHECK(io::read_stat_curve(with_bin).meta.bin_width == 0.2);

  std::istringstream bad("# kind=x\nx,y,yerr\n1,2\n");
  CHECK(message_of([&] { io::read_stat_curve(bad, "c.csv"); }).find("c.csv:3") != std::string::npos);
  std::istringstream missing("# kind=x\n");
  CHECK_THROWS_AS(io::read_stat_curve(missing), DataError);
}

TEST_SUITE_END();
