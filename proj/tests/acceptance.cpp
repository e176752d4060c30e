// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Criteria 9 and 10 drive the CLI binary, whose path comes
// in as argv[1].

#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "magcomp/errors.hpp"
#include "magcomp/evaluation.hpp"
#include "magcomp/flight_data.hpp"
#include "magcomp/geodesy.hpp"
#include "magcomp/map_tools.hpp"
#include "magcomp/signal.hpp"
#include "magcomp/simulator.hpp"
#include "magcomp/tolles_lawson.hpp"
#include "test_support.hpp"

using namespace magcomp;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail) {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << criterion << ": "
            << name << " — " << detail << "\n";
  if (!pass) ++g_failures;
}

sim::SimConfig default_cal_config() {
  sim::SimConfig cfg;
  cfg.sensors.push_back({"UNCOMPMAG1", sim::default_theta(), {0.0, 0.0, 0.0}});
  return cfg;  // 8 legs x 75 s at 10 Hz -> N = 6000
}

const signal::BandpassSpec kBand{0.1, 0.9, 10.0, 4};

// --- criterion 1: coefficient recovery + runtime --------------------------

void criterion_1() {
  const sim::SimConfig cfg = default_cal_config();
  const auto [frame, truth] = sim::simulate_flight(cfg);
  const bool n_ok = frame.size() == 6000;

  const auto t0 = std::chrono::steady_clock::now();
  const tl::TLCoefficients fit = tl::fit_coefficients(
      frame.channel("UNCOMPMAG1"), frame.channel("FLUXB_X"),
      frame.channel("FLUXB_Y"), frame.channel("FLUXB_Z"), kBand);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const Eigen::VectorXd& want = cfg.sensors[0].theta;
  const double err = (fit.theta - want).cwiseAbs().maxCoeff() / want.norm();

  std::ostringstream detail;
  detail << "N=" << frame.size() << ", max rel error " << err << " (< 1e-6), fit took "
         << seconds << " s (< 5)";
  report(1, "coefficient recovery oracle", n_ok && err < 1e-6 && seconds < 5.0,
         detail.str());
}

// --- criterion 2: noise robustness -----------------------------------------

void criterion_2() {
  double total = 0.0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    sim::SimConfig cfg = default_cal_config();
    cfg.scalar_sigma_nt = 0.1;
    cfg.seed = 1000 + static_cast<std::uint64_t>(s);
    const auto [frame, truth] = sim::simulate_flight(cfg);
    const tl::TLCoefficients fit = tl::fit_coefficients(
        frame.channel("UNCOMPMAG1"), frame.channel("FLUXB_X"),
        frame.channel("FLUXB_Y"), frame.channel("FLUXB_Z"), kBand);
    const std::vector<double> comp = tl::compensate(
        fit, frame.channel("UNCOMPMAG1"), frame.channel("FLUXB_X"),
        frame.channel("FLUXB_Y"), frame.channel("FLUXB_Z"));
    std::vector<double> resid(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) {
      resid[i] = comp[i] - truth.h_et_true[i];
    }
    total += test_support::rms(resid);
  }
  const double mean_rms = total / seeds;
  std::ostringstream detail;
  detail << "sigma=0.1 nT, mean compensated RMS over " << seeds << " seeds "
         << mean_rms << " nT (<= 0.15)";
  report(2, "noise robustness", mean_rms <= 0.15, detail.str());
}

// --- criterion 3: generalization across patterns ---------------------------

void criterion_3() {
  const sim::SimConfig cfg_a = default_cal_config();
  const auto [frame_a, truth_a] = sim::simulate_flight(cfg_a);
  const tl::TLCoefficients fit = tl::fit_coefficients(
      frame_a.channel("UNCOMPMAG1"), frame_a.channel("FLUXB_X"),
      frame_a.channel("FLUXB_Y"), frame_a.channel("FLUXB_Z"), kBand);

  sim::SimConfig cfg_b = default_cal_config();
  cfg_b.pattern.leg_length_s = 100.0;
  cfg_b.pattern.n_legs = 3;
  cfg_b.pattern.roll_amp_deg = 14.0;
  cfg_b.pattern.pitch_amp_deg = 9.0;
  cfg_b.pattern.yaw_amp_deg = 22.0;
  cfg_b.pattern.maneuver_freq_hz = 0.19;
  cfg_b.pattern.turn_time_s = 14.0;
  const auto [frame_b, truth_b] = sim::simulate_flight(cfg_b);

  const std::vector<double> comp = tl::compensate(
      fit, frame_b.channel("UNCOMPMAG1"), frame_b.channel("FLUXB_X"),
      frame_b.channel("FLUXB_Y"), frame_b.channel("FLUXB_Z"));
  const double score = eval::rmse_detrended(comp, truth_b.h_et_true);

  std::ostringstream detail;
  detail << "pattern A -> pattern B detrended RMSE " << score << " nT (< 0.05)";
  report(3, "generalization across maneuvers", score < 0.05, detail.str());
}

// --- criterion 4: qualitative sensor ordering ------------------------------

void criterion_4() {
  sim::SimConfig cfg = default_cal_config();
  cfg.sensors[0].theta = 0.3 * sim::default_theta();
  cfg.sensors[0].disturbance_nt = Eigen::Vector3d(30.0, -20.0, 25.0);
  cfg.sensors.push_back({"UNCOMPMAG3", sim::default_theta(),
                         Eigen::Vector3d(300.0, -200.0, 250.0)});
  const auto [frame, truth] = sim::simulate_flight(cfg);

  std::map<std::string, std::optional<tl::TLCoefficients>> plan;
  for (const char* channel : {"UNCOMPMAG1", "UNCOMPMAG3"}) {
    plan[channel] = tl::fit_coefficients(
        frame.channel(channel), frame.channel("FLUXB_X"), frame.channel("FLUXB_Y"),
        frame.channel("FLUXB_Z"), kBand);
  }
  const std::vector<eval::EvalReport> reports =
      eval::evaluate_flight(frame, plan, eval::EvalOptions{});

  double mag1 = 0.0, mag3 = 0.0;
  for (const eval::EvalReport& r : reports) {
    if (r.channel == "UNCOMPMAG1") mag1 = r.rmse_detrended_nt;
    if (r.channel == "UNCOMPMAG3") mag3 = r.rmse_detrended_nt;
  }
  std::ostringstream detail;
  detail << "detrended RMSE mag1 " << mag1 << " nT < mag3 " << mag3 << " nT";
  report(4, "qualitative sensor ordering", mag1 < mag3, detail.str());
}

// --- criterion 5: upward continuation analytics ----------------------------

double dipole_bz(double x_m, double y_m, double height_m, double depth_m) {
  const double dz = height_m + depth_m;
  const double r2 = x_m * x_m + y_m * y_m + dz * dz;
  const double r = std::sqrt(r2);
  return 1.0e12 * (3.0 * dz * dz - r2) / (r2 * r2 * r);
}

map::AnomalyMap dipole_map(std::size_t n, double spacing, double height,
                           double depth) {
  map::AnomalyMap m;
  m.nx = m.ny = n;
  m.dx_m = m.dy_m = spacing;
  m.alt_m = 300.0;
  m.lon_deg.resize(n);
  m.lat_deg.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.lon_deg[i] = -76.0 + static_cast<double>(i) * spacing / 78800.0;
    m.lat_deg[i] = 45.0 + static_cast<double>(i) * spacing / 111100.0;
  }
  m.values.resize(n * n);
  const double c = (static_cast<double>(n) - 1.0) / 2.0 * spacing;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      m.at(j, i) = dipole_bz(static_cast<double>(i) * spacing - c,
                             static_cast<double>(j) * spacing - c, height, depth);
    }
  }
  return m;
}

double interior_rms_rel(const map::AnomalyMap& got, const map::AnomalyMap& want) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = want.ny / 4; j < 3 * want.ny / 4; ++j) {
    for (std::size_t i = want.nx / 4; i < 3 * want.nx / 4; ++i) {
      const double d = got.at(j, i) - want.at(j, i);
      num += d * d;
      den += want.at(j, i) * want.at(j, i);
    }
  }
  return std::sqrt(num / den);
}

void criterion_5() {
  // (a) single-harmonic attenuation, wavelength 1000 m, dz 100 m.
  const std::size_t nh = 128;
  map::AnomalyMap harmonic = dipole_map(nh, 62.5, 0.0, 1e6);  // geometry only
  for (std::size_t j = 0; j < nh; ++j) {
    for (std::size_t i = 0; i < nh; ++i) {
      harmonic.at(j, i) =
          std::cos(2.0 * std::numbers::pi * static_cast<double>(i) * 62.5 / 1000.0);
    }
  }
  const map::AnomalyMap up = map::upward_fft(harmonic, 100.0);
  double mn = up.values[0], mx = up.values[0];
  for (double v : up.values) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  const double amp = (mx - mn) / 2.0;
  const double want_amp = std::exp(-2.0 * std::numbers::pi * 100.0 / 1000.0);
  const double harmonic_err = std::abs(amp - want_amp) / want_amp;

  // (b) dipole continuation on a 256x256 grid, interior half.
  const std::size_t n = 256;
  const double spacing = 100.0, depth = 2000.0, dz = 500.0;
  const map::AnomalyMap m0 = dipole_map(n, spacing, 0.0, depth);
  const map::AnomalyMap want = dipole_map(n, spacing, dz, depth);
  map::UpwardOptions padded;
  padded.mirror_pad = true;
  const map::AnomalyMap cont = map::upward_fft(m0, dz, padded);
  const double dipole_err = interior_rms_rel(cont, want);

  // (c) semigroup with padding.
  const map::AnomalyMap two_step =
      map::upward_fft(map::upward_fft(m0, 200.0, padded), 300.0, padded);
  const map::AnomalyMap one_step = map::upward_fft(m0, 500.0, padded);
  const double semi_err = interior_rms_rel(two_step, one_step);

  std::ostringstream detail;
  detail << "harmonic rel err " << harmonic_err << " (< 1e-3), dipole interior RMS "
         << dipole_err << " (< 1e-2), semigroup " << semi_err << " (< 1e-6)";
  report(5, "upward continuation analytics",
         harmonic_err < 1e-3 && dipole_err < 1e-2 && semi_err < 1e-6, detail.str());
}

// --- criterion 6: filter suite ----------------------------------------------

void criterion_6() {
  const std::vector<double> dc(1000, 42.0);
  const std::vector<double> dc_out = signal::bandpass(dc, kBand);
  const double rejection_db = -20.0 * std::log10(test_support::max_abs(dc_out) / 42.0);

  const std::size_t n = 4000;
  const double pass_gain =
      test_support::mid_amplitude(signal::bandpass(test_support::sine_wave(0.5, 10.0, n), kBand));
  const double stop_gain =
      test_support::mid_amplitude(signal::bandpass(test_support::sine_wave(4.0, 10.0, n), kBand));

  std::ostringstream detail;
  detail << "DC rejection " << rejection_db << " dB (>= 60), 0.5 Hz gain " << pass_gain
         << " (in [0.95, 1]), 4 Hz gain " << stop_gain << " (< 0.05)";
  report(6, "filter suite",
         rejection_db >= 60.0 && pass_gain >= 0.95 && pass_gain <= 1.0 &&
             stop_gain < 0.05,
         detail.str());
}

// --- criterion 7: geodesy ----------------------------------------------------

void criterion_7() {
  test_support::Rng rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double lat = rng.uniform(-1.5, 1.5);
    const double x = rng.uniform(-1e-2, 1e-2);
    const double r1 = geo::delta_lat(geo::delta_north(x, lat), lat);
    const double r2 = geo::delta_lon(geo::delta_east(x, lat), lat);
    worst = std::max(worst, std::abs(r1 - x) / std::abs(x));
    worst = std::max(worst, std::abs(r2 - x) / std::abs(x));
  }

  const double m0 = geo::delta_north(1.0, 0.0);
  const double n0 = geo::delta_east(1.0, 0.0);
  const double want_m0 = 6378137.0 * (1.0 - 6.69437999014e-3);
  const bool scales_ok =
      std::abs(m0 - want_m0) < 1e-3 && std::abs(n0 - 6378137.0) < 1e-6;

  std::ostringstream detail;
  detail << "worst roundtrip rel err " << worst << " (< 1e-12), M(0) " << m0
         << ", N(0) " << n0;
  report(7, "geodesy roundtrips and scale factors", worst < 1e-12 && scales_ok,
         detail.str());
}

// --- criterion 8: detrended-RMSE invariance ----------------------------------

void criterion_8() {
  test_support::Rng rng(2025);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 300;
    std::vector<double> x = rng.uniform_vector(n, -100.0, 100.0);
    const double a = rng.uniform(-1e4, 1e4);
    const double b = rng.uniform(-100.0, 100.0);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a + b * static_cast<double>(i);
    worst = std::max(worst, eval::rmse_detrended(y, x));
  }
  std::ostringstream detail;
  detail << "max rmse_detrended(x, x + a + b*i) = " << worst << " (< 1e-9)";
  report(8, "detrended-RMSE affine invariance", worst < 1e-9, detail.str());
}

// --- criteria 9 and 10: CLI pipeline ----------------------------------------

std::string g_magcomp;

int run_cli(const std::string& args) {
  const std::string cmd = g_magcomp + " " + args;
  const int status = std::system(cmd.c_str());
  if (status < 0) return -1;
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::trunc | std::ios::binary);
  out << content;
}

void criterion_9() {
  const fs::path dir = fs::temp_directory_path() / "magcomp_acceptance_9";
  fs::remove_all(dir);
  fs::create_directories(dir);

  write_file(dir / "sim.cfg",
             "seed=5\nscalar_sigma_nt=0.2\nflux_sigma_nt=1.0\n");
  setenv("MAGCOMP_SEED", "31337", 1);

  bool pass = true;
  std::string detail;
  for (int round = 0; round < 2 && pass; ++round) {
    const fs::path d = dir / ("run" + std::to_string(round));
    fs::create_directories(d);
    const std::string flight = (d / "flight.csv").string();
    const std::string truth = (d / "truth.csv").string();
    const std::string coeffs = (d / "UNCOMPMAG1.tl").string();
    const std::string comp = (d / "comp.csv").string();
    const std::string rep = (d / "report.csv").string();
    const std::string plot = (d / "plot.svg").string();

    int rc = run_cli("-q simulate --config " + (dir / "sim.cfg").string() +
                     " --out " + flight + " --truth " + truth);
    if (rc == 0) {
      rc = run_cli("-q calibrate --in " + flight +
                   " --mag UNCOMPMAG1 --flux B --out " + coeffs);
    }
    if (rc == 0) {
      rc = run_cli("-q compensate --in " + flight + " --coeffs " + coeffs +
                   " --mag UNCOMPMAG1 --flux B --out " + comp);
    }
    if (rc == 0) {
      rc = run_cli("-q evaluate --in " + flight + " --coeffs " + coeffs +
                   " --truth stinger --flux B --report " + rep + " --plot " + plot);
    }
    if (rc != 0) {
      pass = false;
      detail = "pipeline step exited " + std::to_string(rc) + " in round " +
               std::to_string(round);
    }
  }
  unsetenv("MAGCOMP_SEED");

  if (pass) {
    for (const char* name :
         {"flight.csv", "truth.csv", "UNCOMPMAG1.tl", "comp.csv", "report.csv",
          "plot.svg"}) {
      if (slurp(dir / "run0" / name) != slurp(dir / "run1" / name)) {
        pass = false;
        detail = std::string("artifact differs between runs: ") + name;
        break;
      }
    }
    if (pass) detail = "simulate/calibrate/compensate/evaluate byte-identical twice";
  }
  report(9, "pipeline determinism under MAGCOMP_SEED", pass, detail);
}

void criterion_10() {
  const fs::path dir = fs::temp_directory_path() / "magcomp_acceptance_10";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // Constant-attitude flight: flux and scalar channels frozen.
  std::ostringstream csv;
  csv << "TIME,UNCOMPMAG1,FLUXB_X,FLUXB_Y,FLUXB_Z\n";
  for (int i = 0; i < 400; ++i) {
    csv << (0.1 * i) << ",53012.5,26400,120,-45900\n";
  }
  const fs::path flight = dir / "constant.csv";
  write_file(flight, csv.str());

  const std::string stderr_file = (dir / "stderr.txt").string();
  const int rc = run_cli("-q calibrate --in " + flight.string() +
                         " --mag UNCOMPMAG1 --flux B --out " +
                         (dir / "c0.tl").string() + " 2> " + stderr_file);
  const std::string message = slurp(stderr_file);
  const bool exit_ok = rc == 3;
  const bool message_ok = message.find("condition") != std::string::npos;

  // Ridge turns the same input into a shrunken fit, monotone in lambda.
  std::array<double, 3> norms{};
  bool ridge_ok = true;
  const char* lambdas[] = {"1e-4", "1e-3", "1e-2"};
  for (int i = 0; i < 3; ++i) {
    const fs::path out = dir / ("ridge" + std::to_string(i) + ".tl");
    if (run_cli("-q calibrate --in " + flight.string() +
                " --mag UNCOMPMAG1 --flux B --lambda " + lambdas[i] + " --out " +
                out.string()) != 0) {
      ridge_ok = false;
      break;
    }
    const tl::TLCoefficients c = tl::load_coefficients(out);
    norms[static_cast<std::size_t>(i)] = c.theta.norm();
  }
  const bool monotone = ridge_ok && norms[0] >= norms[1] && norms[1] >= norms[2];

  std::ostringstream detail;
  detail << "exit code " << rc << " (want 3), message mentions condition: "
         << (message_ok ? "yes" : "no") << ", ridge norms " << norms[0] << " >= "
         << norms[1] << " >= " << norms[2];
  report(10, "degenerate-input handling", exit_ok && message_ok && monotone,
         detail.str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-magcomp>\n";
    return 2;
  }
  g_magcomp = argv[1];

  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();

  if (g_failures > 0) {
    std::cout << g_failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all 10 acceptance criteria passed\n";
  return 0;
}
