#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "magcomp/errors.hpp"
#include "magcomp/flight_data.hpp"
#include "test_support.hpp"

using namespace magcomp;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p, std::ios::trunc);
  out << content;
  return p;
}

}  // namespace

TEST_CASE("load a small flight file") {
  const fs::path p = temp_file("fd_small.csv",
                               "TIME,UNCOMPMAG3\n"
                               "0.0,53000\n"
                               "0.1,53001\n"
                               "0.2,53002\n");
  const flight::FlightFrame f = flight::load_flight(p);
  CHECK(f.size() == 3);
  CHECK(f.sample_rate_hz() == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(f.channel("UNCOMPMAG3")[2] == 53002.0);
}

TEST_CASE("non-monotone time is rejected") {
  const fs::path p = temp_file("fd_nonmono.csv",
                               "TIME,UNCOMPMAG3\n0.0,1\n0.2,2\n0.1,3\n");
  CHECK_THROWS_WITH_AS(flight::load_flight(p),
                       doctest::Contains("non-monotone time"), ValidationError);
}

TEST_CASE("NaN values load and are reported, not rejected") {
  const fs::path p = temp_file("fd_nan.csv",
                               "TIME,UNCOMPMAG3,FLUXB_X\n"
                               "0.0,53000,100\n"
                               "0.1,53001,NaN\n"
                               "0.2,53002,102\n");
  const flight::FlightFrame f = flight::load_flight(p);
  CHECK(std::isnan(f.channel("FLUXB_X")[1]));

  const std::vector<flight::ChannelReport> reports = flight::check_channels(f);
  std::size_t poisoned = 0;
  for (const flight::ChannelReport& r : reports) {
    if (r.name == "FLUXB_X") {
      CHECK(r.nan_count == 1);
      REQUIRE(r.nan_indices.size() == 1);
      CHECK(r.nan_indices[0] == 1);
      CHECK(r.min == 100.0);
      CHECK(r.max == 102.0);
    }
    if (r.nan_count > 0) ++poisoned;
  }
  CHECK(poisoned == 1);
}

TEST_CASE("loader error paths") {
  CHECK_THROWS_AS(flight::load_flight("/nonexistent/file.csv"), ValidationError);

  const fs::path ragged = temp_file("fd_ragged.csv",
                                    "TIME,UNCOMPMAG3\n0.0,1\n0.1\n");
  CHECK_THROWS_AS(flight::load_flight(ragged), ValidationError);

  const fs::path bad_cell = temp_file("fd_cell.csv",
                                      "TIME,UNCOMPMAG3\n0.0,1\n0.1,abc\n");
  CHECK_THROWS_AS(flight::load_flight(bad_cell), ValidationError);

  const fs::path no_mag = temp_file("fd_nomag.csv", "TIME,PITCH\n0.0,1\n0.1,2\n");
  CHECK_THROWS_AS(flight::load_flight(no_mag), ValidationError);

  const fs::path ok = temp_file("fd_schema.csv",
                                "TIME,UNCOMPMAG3\n0.0,1\n0.1,2\n");
  CHECK_THROWS_AS(flight::load_flight(ok, {"FLUXB_X"}), ValidationError);
  CHECK_NOTHROW(flight::load_flight(ok, {"UNCOMPMAG3"}));
}

TEST_CASE("sample-rate hint is cross-checked against TIME spacing") {
  const fs::path p = temp_file("fd_rate.csv",
                               "TIME,UNCOMPMAG3\n0.0,1\n0.1,2\n0.2,3\n");
  CHECK(flight::load_flight(p, {}, 10.0).sample_rate_hz() == 10.0);
  CHECK_THROWS_AS(flight::load_flight(p, {}, 5.0), ValidationError);
}

TEST_CASE("field-catalog alias spellings resolve to the same channel") {
  const fs::path p = temp_file("fd_alias.csv",
                               "TIME,UNCOMPMAG1,CUR_COMR,V_BAT1\n"
                               "0.0,1,5,12\n0.1,2,6,13\n");
  const flight::FlightFrame f = flight::load_flight(p);
  CHECK(f.has("CUR_COM1"));
  CHECK(f.channel("CUR_COM1")[1] == 6.0);
  CHECK(f.has("V_BATR"));
  CHECK(f.channel("V_BATR")[0] == 12.0);
}

TEST_CASE("save then load is identity, NaN included") {
  test_support::Rng rng(21);
  std::vector<double> time(50), mag(50), flux(50);
  for (std::size_t i = 0; i < 50; ++i) {
    time[i] = static_cast<double>(i) * 0.1;
    mag[i] = 53000.0 + rng.uniform(-100.0, 100.0);
    flux[i] = rng.uniform(-5e4, 5e4);
  }
  mag[7] = std::nan("");
  const flight::FlightFrame f = flight::FlightFrame::from_columns(
      {"TIME", "UNCOMPMAG2", "FLUXB_X"}, {time, mag, flux});

  const fs::path p = fs::temp_directory_path() / "fd_roundtrip.csv";
  flight::save_flight(f, p);
  const flight::FlightFrame g = flight::load_flight(p);

  REQUIRE(g.size() == f.size());
  for (const std::string& name : f.channel_names()) {
    const auto a = f.channel(name);
    const auto b = g.channel(name);
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (std::isnan(a[i])) {
        CHECK(std::isnan(b[i]));
      } else {
        CHECK(a[i] == b[i]);  // bitwise
      }
    }
  }
}

TEST_CASE("select_line extracts matching rows") {
  const std::vector<double> time{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  const std::vector<double> line{1003.01, 1003.01, 1003.02, 1003.02, 1003.02, 1003.01};
  const std::vector<double> mag{1, 2, 3, 4, 5, 6};
  const flight::FlightFrame f = flight::FlightFrame::from_columns(
      {"TIME", "LINE", "UNCOMPMAG1"}, {time, line, mag});

  const flight::FlightFrame sel = flight::select_line(f, 1003.01);
  CHECK(sel.size() == 3);
  CHECK(sel.line_id() == doctest::Approx(1003.01));
  CHECK(sel.channel("UNCOMPMAG1")[2] == 6.0);

  // Withheld line: empty selection is an error.
  CHECK_THROWS_AS(flight::select_line(f, 1003.10), ValidationError);
}

TEST_CASE("line partition preserves the row count") {
  test_support::Rng rng(22);
  const std::size_t n = 400;
  std::vector<double> time(n), line(n), mag(n);
  const double ids[] = {1002.01, 1002.02, 1002.03};
  // Contiguous runs so each selected sub-frame keeps a sane sample rate.
  for (std::size_t i = 0; i < n; ++i) {
    time[i] = static_cast<double>(i) * 0.1;
    line[i] = ids[(i / 40) % 3];
    mag[i] = rng.uniform(-10, 10);
  }
  const flight::FlightFrame f = flight::FlightFrame::from_columns(
      {"TIME", "LINE", "UNCOMPMAG1"}, {time, line, mag});

  std::size_t total = 0;
  for (double id : flight::distinct_lines(f)) {
    total += flight::select_line(f, id).size();
  }
  CHECK(total == n);
}

TEST_CASE("check_channels on a clean frame reports all zeros") {
  const flight::FlightFrame f = flight::FlightFrame::from_columns(
      {"TIME", "UNCOMPMAG1"}, {{0.0, 0.1, 0.2}, {1.0, 2.0, 3.0}});
  for (const flight::ChannelReport& r : flight::check_channels(f)) {
    CHECK(r.nan_count == 0);
    CHECK(r.nan_indices.empty());
  }
}
