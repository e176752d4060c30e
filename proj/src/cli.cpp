#include "magcomp/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "magcomp/errors.hpp"
#include "magcomp/evaluation.hpp"
#include "magcomp/flight_data.hpp"
#include "magcomp/map_tools.hpp"
#include "magcomp/signal.hpp"
#include "magcomp/simulator.hpp"
#include "magcomp/text_io.hpp"
#include "magcomp/tolles_lawson.hpp"

namespace magcomp::cli {

namespace {

struct Logger {
  bool quiet{false};

  template <typename T>
  void config(const std::string& key, const T& value) const {
    if (!quiet) std::cerr << "config: " << key << "=" << value << "\n";
  }
  void info(const std::string& msg) const {
    if (!quiet) std::cerr << msg << "\n";
  }
};

void warn_nan_channels(const flight::FlightFrame& frame, const Logger& log) {
  for (const flight::ChannelReport& r : flight::check_channels(frame)) {
    if (r.nan_count > 0) {
      log.info("warning: channel " + r.name + " has " +
               std::to_string(r.nan_count) + " NaN value(s), first at index " +
               std::to_string(r.nan_indices.front()));
    }
  }
}

std::string flux_prefix_from_flag(const std::string& flux) {
  if (flux != "B" && flux != "C" && flux != "D") {
    throw UsageError("--flux must be one of B, C, D");
  }
  return "FLUX" + flux;
}

std::uint64_t seed_override(std::uint64_t fallback, const Logger& log) {
  const char* env = std::getenv("MAGCOMP_SEED");
  if (env == nullptr) return fallback;
  try {
    const std::uint64_t seed = std::stoull(env);
    log.info("seed overridden by MAGCOMP_SEED");
    return seed;
  } catch (const std::exception&) {
    throw UsageError("MAGCOMP_SEED is not an unsigned integer");
  }
}

int run_simulate(const std::string& config_path, const std::string& out_path,
                 const std::string& truth_path, const Logger& log) {
  sim::SimConfig cfg = sim::load_sim_config(config_path);
  cfg.seed = seed_override(cfg.seed, log);
  log.config("mode", cfg.has_track ? "survey" : "calibration");
  log.config("seed", cfg.seed);
  log.config("fs_hz", io::format_double(cfg.fs_hz));
  log.config("sensors", cfg.sensors.size());
  log.config("scalar_sigma_nt", io::format_double(cfg.scalar_sigma_nt));
  log.config("flux_sigma_nt", io::format_double(cfg.flux_sigma_nt));

  std::pair<flight::FlightFrame, sim::SimTruth> result = [&] {
    if (cfg.has_track) {
      if (cfg.map_path.empty()) {
        throw ValidationError("simulate: survey mode requires a map= entry");
      }
      const map::AnomalyMap anomaly = map::load_map(cfg.map_path);
      const map::MapInterpolant itp(anomaly, map::InterpMethod::bilinear);
      return sim::simulate_survey_line(cfg, itp);
    }
    return sim::simulate_flight(cfg);
  }();

  flight::save_flight(result.first, out_path);
  log.info("wrote " + out_path + " (" + std::to_string(result.first.size()) +
           " samples)");
  if (!truth_path.empty()) {
    std::vector<std::string> sensor_names;
    for (const sim::SensorSpec& s : cfg.sensors) sensor_names.push_back(s.name);
    sim::save_truth(result.second, sensor_names, cfg.fs_hz, truth_path);
    log.info("wrote " + truth_path);
  }
  return 0;
}

int run_calibrate(const std::string& in_path, const std::string& mag,
                  const std::string& flux, double lambda,
                  const signal::BandpassSpec& band_flags, double fs_flag,
                  const std::string& out_path, const Logger& log) {
  const flight::FlightFrame frame = flight::load_flight(in_path, {}, fs_flag);
  warn_nan_channels(frame, log);

  signal::BandpassSpec band = band_flags;
  band.fs_hz = frame.sample_rate_hz();
  const std::string prefix = flux_prefix_from_flag(flux);

  log.config("in", in_path);
  log.config("mag", mag);
  log.config("flux", prefix);
  log.config("lambda", io::format_double(lambda));
  log.config("pass1", io::format_double(band.pass1_hz));
  log.config("pass2", io::format_double(band.pass2_hz));
  log.config("order", band.order);
  log.config("fs", io::format_double(band.fs_hz));

  tl::FitDiagnostics diag;
  const tl::TLCoefficients coeffs = tl::fit_coefficients(
      frame.channel(mag), frame.channel(prefix + "_X"), frame.channel(prefix + "_Y"),
      frame.channel(prefix + "_Z"), band, lambda, &diag);
  log.info("fit: effective rank " + std::to_string(diag.effective_rank) +
           ", condition " + io::format_double(diag.condition) +
           ", in-band residual RMS " + io::format_double(diag.residual_rms) + " nT");

  tl::save_coefficients(coeffs, out_path);
  log.info("wrote " + out_path);
  return 0;
}

int run_compensate(const std::string& in_path, const std::string& coeffs_path,
                   const std::string& mag, const std::string& flux,
                   double fs_flag, const std::string& out_path, const Logger& log) {
  const flight::FlightFrame frame = flight::load_flight(in_path, {}, fs_flag);
  warn_nan_channels(frame, log);
  const tl::TLCoefficients coeffs = tl::load_coefficients(coeffs_path);
  const std::string prefix = flux_prefix_from_flag(flux);

  log.config("in", in_path);
  log.config("coeffs", coeffs_path);
  log.config("mag", mag);
  log.config("flux", prefix);

  const std::vector<double> comp = tl::compensate(
      coeffs, frame.channel(mag), frame.channel(prefix + "_X"),
      frame.channel(prefix + "_Y"), frame.channel(prefix + "_Z"));

  // Compensated channel name follows the field catalog: UNCOMPMAG3 -> COMPMAG3.
  std::string comp_name = mag;
  if (comp_name.rfind("UNCOMP", 0) == 0) {
    comp_name = comp_name.substr(2);  // UNCOMPMAGn -> COMPMAGn
  } else {
    comp_name += "_COMP";
  }

  std::vector<std::string> names = frame.channel_names();
  std::vector<std::vector<double>> columns;
  for (const std::string& n : names) {
    const std::span<const double> col = frame.channel(n);
    columns.emplace_back(col.begin(), col.end());
  }
  names.push_back(comp_name);
  columns.push_back(comp);
  const flight::FlightFrame out = flight::FlightFrame::from_columns(
      std::move(names), std::move(columns), frame.sample_rate_hz());
  flight::save_flight(out, out_path);
  log.info("wrote " + out_path + " with channel " + comp_name);
  return 0;
}

int run_evaluate(const std::string& in_path, const std::string& coeffs_path,
                 const std::vector<std::string>& raw_channels,
                 const std::string& truth, const std::string& map_path,
                 const std::string& flux, double core_field, bool per_series,
                 double fs_flag, const std::string& report_path,
                 const std::string& plot_path, const Logger& log) {
  eval::EvalOptions options;
  options.flux_prefix = flux_prefix_from_flag(flux);
  options.core_field_nt = core_field;
  options.per_series_detrend = per_series;
  if (truth == "stinger") {
    options.truth_source = eval::TruthSource::stinger;
  } else if (truth == "map") {
    options.truth_source = eval::TruthSource::map;
  } else {
    throw UsageError("--truth must be 'stinger' or 'map'");
  }

  const flight::FlightFrame frame = flight::load_flight(in_path, {}, fs_flag);
  warn_nan_channels(frame, log);

  std::optional<map::MapInterpolant> anomaly;
  if (options.truth_source == eval::TruthSource::map) {
    if (map_path.empty()) throw UsageError("--truth map requires --map <file>");
    anomaly.emplace(map::load_map(map_path), map::InterpMethod::bilinear);
    options.anomaly = &*anomaly;
  }

  std::map<std::string, std::optional<tl::TLCoefficients>> plan;
  namespace fs = std::filesystem;
  if (!coeffs_path.empty()) {
    if (fs::is_directory(coeffs_path)) {
      for (const fs::directory_entry& entry : fs::directory_iterator(coeffs_path)) {
        if (entry.path().extension() == ".tl") {
          plan[entry.path().stem().string()] =
              tl::load_coefficients(entry.path());
        }
      }
      if (plan.empty()) {
        throw ValidationError("evaluate: no *.tl coefficient files in " + coeffs_path);
      }
    } else {
      // A single coefficient file applies to every UNCOMPMAG channel present.
      const tl::TLCoefficients coeffs = tl::load_coefficients(coeffs_path);
      for (const std::string& name : frame.channel_names()) {
        if (name.rfind("UNCOMPMAG", 0) == 0) plan[name] = coeffs;
      }
    }
  }
  for (const std::string& ch : raw_channels) plan[ch] = std::nullopt;
  if (plan.empty()) {
    throw UsageError("evaluate: nothing to score; pass --coeffs and/or --raw");
  }

  log.config("in", in_path);
  log.config("truth", truth);
  log.config("flux", options.flux_prefix);
  log.config("channels", plan.size());

  const std::vector<eval::EvalReport> reports =
      eval::evaluate_flight(frame, plan, options);
  for (const eval::EvalReport& r : reports) {
    log.info(r.channel + ": rmse " + io::format_double(r.rmse_nt) +
             " nT, detrended " + io::format_double(r.rmse_detrended_nt) + " nT");
  }
  eval::write_report_csv(reports, report_path);
  log.info("wrote " + report_path);

  if (!plot_path.empty()) {
    std::vector<double> truth_vec;
    if (options.truth_source == eval::TruthSource::stinger) {
      const std::span<const double> t = frame.channel("IGRFMAG1");
      truth_vec.assign(t.begin(), t.end());
    } else {
      const std::span<const double> lat = frame.channel("LAT");
      const std::span<const double> lon = frame.channel("LONG");
      truth_vec.resize(frame.size());
      for (std::size_t i = 0; i < frame.size(); ++i) {
        truth_vec[i] = core_field + anomaly->at(lon[i], lat[i]);
      }
    }
    std::map<std::string, std::vector<double>> traces;
    for (const auto& [channel, coeffs] : plan) {
      const std::span<const double> raw = frame.channel(channel);
      if (coeffs.has_value()) {
        traces[channel + " (TL)"] = tl::compensate(
            *coeffs, raw, frame.channel(options.flux_prefix + "_X"),
            frame.channel(options.flux_prefix + "_Y"),
            frame.channel(options.flux_prefix + "_Z"));
      } else {
        traces[channel].assign(raw.begin(), raw.end());
      }
    }
    eval::write_plot_svg(frame, truth_vec, traces, plot_path);
    log.info("wrote " + plot_path);
  }
  return 0;
}

int run_map_upward(const std::string& in_path, double dz, bool pad,
                   bool allow_downward, double kcut, const std::string& out_path,
                   const Logger& log) {
  const map::AnomalyMap in = map::load_map(in_path);
  map::UpwardOptions options;
  options.mirror_pad = pad;
  options.allow_downward = allow_downward;
  options.k_cutoff_rad_m = kcut;

  log.config("in", in_path);
  log.config("dz_m", io::format_double(dz));
  log.config("pad", pad ? "true" : "false");
  if (allow_downward) log.config("kcut", io::format_double(kcut));

  const map::AnomalyMap out = map::upward_fft(in, dz, options);
  map::save_map(out, out_path);
  log.info("wrote " + out_path + " at altitude " + io::format_double(out.alt_m) + " m");
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"magcomp: Tolles-Lawson aeromagnetic compensation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // allow -q after the subcommand name
  Logger log;
  app.add_flag("-q,--quiet", log.quiet, "suppress progress output");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "forward-model a flight with known truth");
  std::string sim_config, sim_out, sim_truth;
  sim_cmd->add_option("--config", sim_config, "key=value simulator config")->required();
  sim_cmd->add_option("--out", sim_out, "output flight file")->required();
  sim_cmd->add_option("--truth", sim_truth, "optional ground-truth CSV");

  // calibrate
  auto* cal_cmd = app.add_subcommand("calibrate", "fit Tolles-Lawson coefficients");
  std::string cal_in, cal_mag, cal_flux = "B", cal_out;
  double cal_lambda = 0.0, cal_fs = 0.0;
  signal::BandpassSpec cal_band;
  cal_cmd->add_option("--in", cal_in, "calibration flight file")->required();
  cal_cmd->add_option("--mag", cal_mag, "scalar magnetometer channel")->required();
  cal_cmd->add_option("--flux", cal_flux, "fluxgate selector: B, C or D");
  cal_cmd->add_option("--lambda", cal_lambda, "ridge parameter (default 0)");
  cal_cmd->add_option("--pass1", cal_band.pass1_hz, "lower band edge, Hz");
  cal_cmd->add_option("--pass2", cal_band.pass2_hz, "upper band edge, Hz");
  cal_cmd->add_option("--order", cal_band.order, "bandpass order (even)");
  cal_cmd->add_option("--fs", cal_fs, "assert the sample rate, Hz");
  cal_cmd->add_option("--out", cal_out, "coefficient file to write")->required();

  // compensate
  auto* comp_cmd = app.add_subcommand("compensate", "remove the aircraft field");
  std::string comp_in, comp_coeffs, comp_mag, comp_flux = "B", comp_out;
  double comp_fs = 0.0;
  comp_cmd->add_option("--in", comp_in, "flight file")->required();
  comp_cmd->add_option("--coeffs", comp_coeffs, "coefficient file")->required();
  comp_cmd->add_option("--mag", comp_mag, "scalar magnetometer channel")->required();
  comp_cmd->add_option("--flux", comp_flux, "fluxgate selector: B, C or D");
  comp_cmd->add_option("--fs", comp_fs, "assert the sample rate, Hz");
  comp_cmd->add_option("--out", comp_out, "output flight file")->required();

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "detrended-RMSE scoring");
  std::string eval_in, eval_coeffs, eval_truth = "stinger", eval_map, eval_flux = "B";
  std::string eval_report, eval_plot;
  std::vector<std::string> eval_raw;
  double eval_core = 0.0, eval_fs = 0.0;
  bool eval_per_series = false;
  eval_cmd->add_option("--in", eval_in, "flight file")->required();
  eval_cmd->add_option("--coeffs", eval_coeffs,
                       "coefficient file, or directory of <channel>.tl files");
  eval_cmd->add_option("--raw", eval_raw, "score a channel without compensation");
  eval_cmd->add_option("--truth", eval_truth, "truth source: stinger or map");
  eval_cmd->add_option("--map", eval_map, "anomaly map (for --truth map)");
  eval_cmd->add_option("--flux", eval_flux, "fluxgate selector: B, C or D");
  eval_cmd->add_option("--core-field", eval_core,
                       "core-field magnitude added to map truth, nT");
  eval_cmd->add_flag("--per-series-detrend", eval_per_series,
                     "detrend candidate and truth separately");
  eval_cmd->add_option("--fs", eval_fs, "assert the sample rate, Hz");
  eval_cmd->add_option("--report", eval_report, "report CSV to write")->required();
  eval_cmd->add_option("--plot", eval_plot, "optional SVG plot of the traces");

  // map-upward
  auto* map_cmd = app.add_subcommand("map-upward", "upward-continue an anomaly map");
  std::string map_in, map_out;
  double map_dz = 0.0, map_kcut = 0.0;
  bool map_pad = false, map_down = false;
  map_cmd->add_option("--in", map_in, "input map")->required();
  map_cmd->add_option("--dz", map_dz, "continuation distance, m")->required();
  map_cmd->add_flag("--pad", map_pad, "mirror-pad to reduce wraparound");
  map_cmd->add_flag("--allow-downward", map_down, "permit dz < 0 (needs --kcut)");
  map_cmd->add_option("--kcut", map_kcut, "wavenumber cutoff, rad/m");
  map_cmd->add_option("--out", map_out, "output map")->required();

  try {
    app.parse(argc, argv);
    if (*sim_cmd) return run_simulate(sim_config, sim_out, sim_truth, log);
    if (*cal_cmd) {
      return run_calibrate(cal_in, cal_mag, cal_flux, cal_lambda, cal_band, cal_fs,
                           cal_out, log);
    }
    if (*comp_cmd) {
      return run_compensate(comp_in, comp_coeffs, comp_mag, comp_flux, comp_fs,
                            comp_out, log);
    }
    if (*eval_cmd) {
      return run_evaluate(eval_in, eval_coeffs, eval_raw, eval_truth, eval_map,
                          eval_flux, eval_core, eval_per_series, eval_fs,
                          eval_report, eval_plot, log);
    }
    if (*map_cmd) {
      return run_map_upward(map_in, map_dz, map_pad, map_down, map_kcut, map_out, log);
    }
    std::cerr << app.help();
    return 1;
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace magcomp::cli
