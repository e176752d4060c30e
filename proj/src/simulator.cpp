#include "magcomp/simulator.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "magcomp/errors.hpp"
#include "magcomp/geodesy.hpp"
#include "magcomp/text_io.hpp"
#include "magcomp/tolles_lawson.hpp"

namespace magcomp::sim {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kGoldenAngle = 2.399963229728653;

// Fixed harmonic structure of the maneuvers, relative to maneuver_freq_hz.
// Two harmonics per axis keep every coefficient direction excited inside the
// calibration band; the secondary runs at a quarter of the amplitude.
constexpr double kRollRatio1 = 1.60, kRollRatio2 = 2.48;
constexpr double kPitchRatio1 = 2.20, kPitchRatio2 = 1.32;
constexpr double kYawRatio1 = 1.12, kYawRatio2 = 1.88;
constexpr double kSecondaryAmp = 0.25;
constexpr double kMaxHarmonicRatio = 2.48;

// Switching rate of the optional sensor disturbance, inside the calibration
// band so it visibly corrupts a fit.
constexpr double kDisturbanceSwitchHz = 0.125;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Deterministic Gaussian stream: fixed Box-Muller over mt19937_64, so output
// is bit-identical across platforms (std::normal_distribution is not).
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream)
      : eng_(splitmix64(seed ^ splitmix64(stream))) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 =
        (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(eng_() >> 11) * 0x1.0p-53;  // [0, 1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_{false};
  double spare_{0.0};
};

double smoothstep(double w) {
  w = std::clamp(w, 0.0, 1.0);
  return w * w * (3.0 - 2.0 * w);
}

struct Attitude {
  std::vector<double> roll_deg, pitch_deg, yaw_deg;
};

Attitude box_attitude(const SimConfig& cfg, std::size_t n) {
  const BoxPattern& p = cfg.pattern;
  const int total_legs = p.n_legs * p.repeats;
  const double heading_step = 360.0 / p.n_legs;

  std::vector<double> base(static_cast<std::size_t>(total_legs));
  for (int leg = 0; leg < total_legs; ++leg) {
    const int box = leg / p.n_legs;
    const int lib = leg % p.n_legs;
    if (box % 2 == 0) {
      base[static_cast<std::size_t>(leg)] = heading_step * lib;
    } else {
      // Opposite circulation, offset onto the diagonals.
      base[static_cast<std::size_t>(leg)] =
          heading_step * (p.n_legs - lib) - heading_step / 2.0;
    }
  }

  Attitude att;
  att.roll_deg.resize(n);
  att.pitch_deg.resize(n);
  att.yaw_deg.resize(n);
  const double bank_amp = std::min(20.0, p.roll_amp_deg);
  const double f0 = p.maneuver_freq_hz;
  const double two_pi = 2.0 * std::numbers::pi;

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / cfg.fs_hz;
    int leg = static_cast<int>(t / p.leg_length_s);
    leg = std::min(leg, total_legs - 1);
    const double tl = t - leg * p.leg_length_s;
    const double ph = kGoldenAngle * leg;

    double heading = base[static_cast<std::size_t>(leg)];
    double bank = 0.0;
    if (leg > 0) {
      const double w = smoothstep(tl / p.turn_time_s);
      const double prev = base[static_cast<std::size_t>(leg - 1)];
      heading = prev + (heading - prev) * w;
      bank = bank_amp * 4.0 * w * (1.0 - w);
    }

    att.roll_deg[i] = p.roll_amp_deg * std::sin(two_pi * kRollRatio1 * f0 * tl + ph) +
                      kSecondaryAmp * p.roll_amp_deg *
                          std::sin(two_pi * kRollRatio2 * f0 * tl + 1.3 * ph) +
                      bank;
    att.pitch_deg[i] =
        p.pitch_amp_deg * std::sin(two_pi * kPitchRatio1 * f0 * tl + 2.0 * ph) +
        kSecondaryAmp * p.pitch_amp_deg *
            std::sin(two_pi * kPitchRatio2 * f0 * tl + 0.7 * ph);
    att.yaw_deg[i] = heading +
                     p.yaw_amp_deg * std::sin(two_pi * kYawRatio1 * f0 * tl + 3.0 * ph) +
                     kSecondaryAmp * p.yaw_amp_deg *
                         std::sin(two_pi * kYawRatio2 * f0 * tl + 2.1 * ph);
  }
  return att;
}

Attitude survey_attitude(const SimConfig& cfg, std::size_t n, double heading_deg) {
  // Straight and level with small residual maneuvers.
  SimConfig gentle = cfg;
  gentle.pattern.roll_amp_deg = std::max(1e-3, 0.1 * cfg.pattern.roll_amp_deg);
  gentle.pattern.pitch_amp_deg = std::max(1e-3, 0.1 * cfg.pattern.pitch_amp_deg);
  gentle.pattern.yaw_amp_deg = std::max(1e-3, 0.1 * cfg.pattern.yaw_amp_deg);

  Attitude att;
  att.roll_deg.resize(n);
  att.pitch_deg.resize(n);
  att.yaw_deg.resize(n);
  const double f0 = cfg.pattern.maneuver_freq_hz;
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / cfg.fs_hz;
    att.roll_deg[i] = gentle.pattern.roll_amp_deg * std::sin(two_pi * kRollRatio1 * f0 * t);
    att.pitch_deg[i] =
        gentle.pattern.pitch_amp_deg * std::sin(two_pi * kPitchRatio1 * f0 * t + 1.1);
    att.yaw_deg[i] = heading_deg +
                     gentle.pattern.yaw_amp_deg * std::sin(two_pi * kYawRatio1 * f0 * t + 2.3);
  }
  return att;
}

// Body components of a navigation-frame vector under intrinsic Z-Y-X attitude
// (yaw about up, then pitch, then roll), frame x forward / y port / z up.
Eigen::Vector3d nav_to_body(const Eigen::Vector3d& v, double roll_rad,
                            double pitch_rad, double yaw_rad) {
  const double cr = std::cos(roll_rad), sr = std::sin(roll_rad);
  const double cp = std::cos(pitch_rad), sp = std::sin(pitch_rad);
  const double cy = std::cos(yaw_rad), sy = std::sin(yaw_rad);
  Eigen::Matrix3d r_nb;  // body -> nav
  r_nb << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
          sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
          -sp,     cp * sr,                cp * cr;
  return r_nb.transpose() * v;
}

struct SimStreams {
  // Fixed stream ids so channel noise is independent of sensor count.
  static constexpr std::uint64_t kFluxX = 101, kFluxY = 102, kFluxZ = 103;
  static constexpr std::uint64_t kScalarBase = 200;
};

std::pair<flight::FlightFrame, SimTruth> run_simulation(
    const SimConfig& cfg, const map::MapInterpolant* anomaly) {
  cfg.validate();
  const BoxPattern& p = cfg.pattern;
  const double duration_s = p.leg_length_s * p.n_legs * p.repeats;
  const std::size_t n = static_cast<std::size_t>(std::llround(duration_s * cfg.fs_hz));
  if (n < 3) {
    throw ValidationError("simulate: pattern too short for the sample rate");
  }

  std::vector<double> lon(n), lat(n);
  Attitude att;
  if (cfg.has_track) {
    const double lat_mid_rad =
        0.5 * (cfg.track.lat_start_deg + cfg.track.lat_end_deg) * kDegToRad;
    const double dn = geo::delta_north(
        (cfg.track.lat_end_deg - cfg.track.lat_start_deg) * kDegToRad, lat_mid_rad);
    const double de = geo::delta_east(
        (cfg.track.lon_end_deg - cfg.track.lon_start_deg) * kDegToRad, lat_mid_rad);
    // Heading measured from north toward west (the frame's positive yaw).
    const double heading_deg = std::atan2(-de, dn) / kDegToRad;
    att = survey_attitude(cfg, n, heading_deg);
    for (std::size_t i = 0; i < n; ++i) {
      const double f = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
      lon[i] = cfg.track.lon_start_deg +
               (cfg.track.lon_end_deg - cfg.track.lon_start_deg) * f;
      lat[i] = cfg.track.lat_start_deg +
               (cfg.track.lat_end_deg - cfg.track.lat_start_deg) * f;
    }
  } else {
    att = box_attitude(cfg, n);
  }

  SimTruth truth;
  truth.attitude_deg.resize(static_cast<Eigen::Index>(n), 3);
  truth.flux_true.resize(static_cast<Eigen::Index>(n), 3);
  truth.h_et_true.resize(n);

  const double field_norm = cfg.earth_field_nt.norm();
  for (std::size_t i = 0; i < n; ++i) {
    const auto ei = static_cast<Eigen::Index>(i);
    truth.attitude_deg(ei, 0) = att.roll_deg[i];
    truth.attitude_deg(ei, 1) = att.pitch_deg[i];
    truth.attitude_deg(ei, 2) = att.yaw_deg[i];
    truth.flux_true.row(ei) =
        nav_to_body(cfg.earth_field_nt, att.roll_deg[i] * kDegToRad,
                    att.pitch_deg[i] * kDegToRad, att.yaw_deg[i] * kDegToRad)
            .transpose();
    double h_et = field_norm;
    if (anomaly != nullptr) {
      try {
        h_et += anomaly->at(lon[i], lat[i]);
      } catch (const ValidationError&) {
        throw ValidationError("simulate: survey track leaves the anomaly map at sample " +
                              std::to_string(i));
      }
    }
    truth.h_et_true[i] = h_et;
  }

  // Tolles-Lawson features from the true flux; the model is exact by
  // construction so estimator checks have a sharp pass/fail.
  const std::vector<double> fx(truth.flux_true.col(0).data(),
                               truth.flux_true.col(0).data() + n);
  const std::vector<double> fy(truth.flux_true.col(1).data(),
                               truth.flux_true.col(1).data() + n);
  const std::vector<double> fz(truth.flux_true.col(2).data(),
                               truth.flux_true.col(2).data() + n);
  const Eigen::MatrixX3d u = tl::direction_cosines(fx, fy, fz);
  const Eigen::MatrixXd delta = tl::build_design_matrix(u);

  truth.h_at_true.reserve(cfg.sensors.size());
  for (const SensorSpec& sensor : cfg.sensors) {
    const Eigen::VectorXd modeled = delta * sensor.theta;
    std::vector<double> h_at(n);
    const bool disturbed = sensor.disturbance_nt.norm() > 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ei = static_cast<Eigen::Index>(i);
      double v = modeled(ei);
      if (disturbed) {
        // Switched body-fixed source (think cabin currents toggling): the
        // gating puts energy in the calibration band that no function of the
        // direction cosines can express, unlike a constant vector offset,
        // which the permanent/induced terms absorb almost completely.
        const double t = static_cast<double>(i) / cfg.fs_hz;
        const double gate =
            std::sin(2.0 * std::numbers::pi * kDisturbanceSwitchHz * t) >= 0.0
                ? 1.0
                : 0.0;
        v += gate *
             ((truth.flux_true.row(ei).transpose() + sensor.disturbance_nt).norm() -
              field_norm);
      }
      h_at[i] = v;
    }
    truth.h_at_true.push_back(std::move(h_at));
  }

  // Assemble channels.
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;
  auto add = [&](const std::string& name, std::vector<double> col) {
    names.push_back(name);
    cols.push_back(std::move(col));
  };

  std::vector<double> time(n), line(n);
  for (std::size_t i = 0; i < n; ++i) {
    time[i] = static_cast<double>(i) / cfg.fs_hz;
    line[i] = cfg.line_id;
  }
  add("LINE", std::move(line));
  add("TIME", std::move(time));
  if (cfg.has_track) {
    add("LAT", lat);
    add("LONG", lon);
    add("BARO", std::vector<double>(n, cfg.track.alt_m));
  }

  for (std::size_t s = 0; s < cfg.sensors.size(); ++s) {
    GaussianStream noise(cfg.seed, SimStreams::kScalarBase + s);
    std::vector<double> scalar(n);
    for (std::size_t i = 0; i < n; ++i) {
      scalar[i] = truth.h_et_true[i] + truth.h_at_true[s][i];
      if (cfg.scalar_sigma_nt > 0.0) scalar[i] += cfg.scalar_sigma_nt * noise.next();
    }
    add(cfg.sensors[s].name, std::move(scalar));
  }

  add("IGRFMAG1", truth.h_et_true);

  const std::uint64_t flux_streams[3] = {SimStreams::kFluxX, SimStreams::kFluxY,
                                         SimStreams::kFluxZ};
  const char* flux_names[3] = {"FLUXB_X", "FLUXB_Y", "FLUXB_Z"};
  for (int c = 0; c < 3; ++c) {
    GaussianStream noise(cfg.seed, flux_streams[c]);
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) {
      col[i] = truth.flux_true(static_cast<Eigen::Index>(i), c);
      if (cfg.flux_sigma_nt > 0.0) col[i] += cfg.flux_sigma_nt * noise.next();
    }
    add(flux_names[c], std::move(col));
  }

  add("PITCH", att.pitch_deg);
  add("ROLL", att.roll_deg);
  add("AZIMUTH", att.yaw_deg);

  // Current/voltage channels are not simulated; zeros keep the schema usable.
  for (const char* zero_name : {"CUR_COM1", "CUR_ACPWR", "V_BAT1", "V_BAT2"}) {
    add(zero_name, std::vector<double>(n, 0.0));
  }

  flight::FlightFrame frame =
      flight::FlightFrame::from_columns(std::move(names), std::move(cols), cfg.fs_hz);
  return {std::move(frame), std::move(truth)};
}

std::vector<double> parse_vector(const std::string& value, const std::string& key) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    const std::string tok = comma == std::string::npos
                                ? value.substr(start)
                                : value.substr(start, comma - start);
    out.push_back(io::parse_double(tok, "sim config key " + key));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

void SimConfig::validate() const {
  if (!(fs_hz > 0.0)) throw ValidationError("sim config: fs_hz must be positive");
  const double max_freq = pattern.maneuver_freq_hz * kMaxHarmonicRatio;
  if (!(fs_hz > 2.0 * max_freq)) {
    throw ValidationError(
        "sim config: fs_hz must exceed twice the highest maneuver harmonic (" +
        io::format_double(max_freq) + " Hz)");
  }
  if (!(pattern.maneuver_freq_hz > 0.0)) {
    throw ValidationError("sim config: maneuver_freq_hz must be positive");
  }
  for (double amp : {pattern.roll_amp_deg, pattern.pitch_amp_deg, pattern.yaw_amp_deg}) {
    if (!(amp > 0.0) || amp > 30.0) {
      throw ValidationError("sim config: maneuver amplitudes must lie in (0, 30] deg");
    }
  }
  if (pattern.leg_length_s <= 0.0 || pattern.n_legs < 1 || pattern.repeats < 1) {
    throw ValidationError("sim config: pattern geometry must be positive");
  }
  if (pattern.turn_time_s <= 0.0 || pattern.turn_time_s >= pattern.leg_length_s) {
    throw ValidationError("sim config: turn_time_s must lie in (0, leg_length_s)");
  }
  if (!(earth_field_nt.norm() > 0.0)) {
    throw ValidationError("sim config: earth field must be nonzero");
  }
  if (scalar_sigma_nt < 0.0 || flux_sigma_nt < 0.0) {
    throw ValidationError("sim config: noise levels must be nonnegative");
  }
  if (sensors.empty()) {
    throw ValidationError("sim config: at least one scalar sensor required");
  }
  for (const SensorSpec& s : sensors) {
    if (s.theta.size() != tl::kTerms) {
      throw ValidationError("sim config: sensor " + s.name +
                            " coefficient vector must have 18 terms");
    }
  }
}

Eigen::VectorXd default_theta() {
  Eigen::VectorXd theta(tl::kTerms);
  // Permanent (nT), induced (traceless diagonal), eddy.
  theta << 30.0, -40.0, 25.0,
           12.0, -5.0, 7.0, -4.0, 3.0, -8.0,
           150.0, -80.0, 60.0, 110.0, -170.0, 90.0, -60.0, 130.0, -100.0;
  return theta;
}

std::pair<flight::FlightFrame, SimTruth> simulate_flight(const SimConfig& cfg) {
  if (cfg.has_track) {
    throw ValidationError("simulate_flight: config carries a survey track; "
                          "use simulate_survey_line");
  }
  return run_simulation(cfg, nullptr);
}

std::pair<flight::FlightFrame, SimTruth> simulate_survey_line(
    const SimConfig& cfg, const map::MapInterpolant& anomaly) {
  if (!cfg.has_track) {
    throw ValidationError("simulate_survey_line: config has no track");
  }
  return run_simulation(cfg, &anomaly);
}

SimConfig load_sim_config(const std::filesystem::path& path) {
  std::istringstream in(io::read_text(path));
  SimConfig cfg;
  cfg.sensors.push_back({"UNCOMPMAG1", default_theta(), {0.0, 0.0, 0.0}});
  bool track_start_seen = false;
  bool track_end_seen = false;

  auto sensor_at = [&cfg](std::size_t index) -> SensorSpec& {
    while (cfg.sensors.size() <= index) {
      const std::size_t next = cfg.sensors.size() + 1;
      cfg.sensors.push_back({"UNCOMPMAG" + std::to_string(next),
                             Eigen::VectorXd::Zero(tl::kTerms),
                             {0.0, 0.0, 0.0}});
    }
    return cfg.sensors[index];
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const std::size_t e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": expected key=value");
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    const std::string ctx = path.string() + " key " + key;

    if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(io::parse_double(value, ctx));
    } else if (key == "fs_hz") {
      cfg.fs_hz = io::parse_double(value, ctx);
    } else if (key == "line") {
      cfg.line_id = io::parse_double(value, ctx);
    } else if (key == "earth_field_nt") {
      const std::vector<double> v = parse_vector(value, key);
      if (v.size() != 3) throw ValidationError(ctx + ": need 3 components");
      cfg.earth_field_nt = Eigen::Vector3d(v[0], v[1], v[2]);
    } else if (key == "leg_length_s") {
      cfg.pattern.leg_length_s = io::parse_double(value, ctx);
    } else if (key == "n_legs") {
      cfg.pattern.n_legs = static_cast<int>(io::parse_double(value, ctx));
    } else if (key == "repeats") {
      cfg.pattern.repeats = static_cast<int>(io::parse_double(value, ctx));
    } else if (key == "roll_amp_deg") {
      cfg.pattern.roll_amp_deg = io::parse_double(value, ctx);
    } else if (key == "pitch_amp_deg") {
      cfg.pattern.pitch_amp_deg = io::parse_double(value, ctx);
    } else if (key == "yaw_amp_deg") {
      cfg.pattern.yaw_amp_deg = io::parse_double(value, ctx);
    } else if (key == "maneuver_freq_hz") {
      cfg.pattern.maneuver_freq_hz = io::parse_double(value, ctx);
    } else if (key == "turn_time_s") {
      cfg.pattern.turn_time_s = io::parse_double(value, ctx);
    } else if (key == "scalar_sigma_nt") {
      cfg.scalar_sigma_nt = io::parse_double(value, ctx);
    } else if (key == "flux_sigma_nt") {
      cfg.flux_sigma_nt = io::parse_double(value, ctx);
    } else if (key == "theta") {
      const std::vector<double> v = parse_vector(value, key);
      if (v.size() != tl::kTerms) throw ValidationError(ctx + ": need 18 values");
      sensor_at(0).theta = Eigen::Map<const Eigen::VectorXd>(v.data(), tl::kTerms);
    } else if (key == "disturbance_nt") {
      const std::vector<double> v = parse_vector(value, key);
      if (v.size() != 3) throw ValidationError(ctx + ": need 3 components");
      sensor_at(0).disturbance_nt = Eigen::Vector3d(v[0], v[1], v[2]);
    } else if (key.rfind("mag", 0) == 0 &&
               (key.find("_theta") != std::string::npos ||
                key.find("_disturbance_nt") != std::string::npos)) {
      const std::size_t us = key.find('_');
      const int idx = std::stoi(key.substr(3, us - 3));
      if (idx < 2 || idx > 9) {
        throw ValidationError(ctx + ": sensor index must be 2..9");
      }
      SensorSpec& s = sensor_at(static_cast<std::size_t>(idx - 1));
      const std::vector<double> v = parse_vector(value, key);
      if (key.find("_theta") != std::string::npos) {
        if (v.size() != tl::kTerms) throw ValidationError(ctx + ": need 18 values");
        s.theta = Eigen::Map<const Eigen::VectorXd>(v.data(), tl::kTerms);
      } else {
        if (v.size() != 3) throw ValidationError(ctx + ": need 3 components");
        s.disturbance_nt = Eigen::Vector3d(v[0], v[1], v[2]);
      }
    } else if (key == "track_start") {
      const std::vector<double> v = parse_vector(value, key);
      if (v.size() != 2) throw ValidationError(ctx + ": need lon,lat");
      cfg.track.lon_start_deg = v[0];
      cfg.track.lat_start_deg = v[1];
      track_start_seen = true;
    } else if (key == "track_end") {
      const std::vector<double> v = parse_vector(value, key);
      if (v.size() != 2) throw ValidationError(ctx + ": need lon,lat");
      cfg.track.lon_end_deg = v[0];
      cfg.track.lat_end_deg = v[1];
      track_end_seen = true;
    } else if (key == "track_alt_m") {
      cfg.track.alt_m = io::parse_double(value, ctx);
    } else if (key == "map") {
      cfg.map_path = value;
    } else {
      throw ValidationError(ctx + ": unknown key");
    }
  }

  if (track_start_seen || track_end_seen) {
    if (!(track_start_seen && track_end_seen)) {
      throw ValidationError(path.string() +
                            ": survey mode needs both track_start and track_end");
    }
    cfg.has_track = true;
  }
  cfg.validate();
  return cfg;
}

void save_truth(const SimTruth& truth, const std::vector<std::string>& sensor_names,
                double fs_hz, const std::filesystem::path& path) {
  std::string out = "TIME,H_ET_TRUE";
  for (const std::string& name : sensor_names) {
    out += ",H_AT_" + name;
  }
  out += ",ROLL,PITCH,AZIMUTH\n";
  const std::size_t n = truth.h_et_true.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto ei = static_cast<Eigen::Index>(i);
    out += io::format_double(static_cast<double>(i) / fs_hz);
    out += ',' + io::format_double(truth.h_et_true[i]);
    for (const std::vector<double>& h_at : truth.h_at_true) {
      out += ',' + io::format_double(h_at[i]);
    }
    out += ',' + io::format_double(truth.attitude_deg(ei, 0));
    out += ',' + io::format_double(truth.attitude_deg(ei, 1));
    out += ',' + io::format_double(truth.attitude_deg(ei, 2));
    out += '\n';
  }
  io::write_text_atomic(path, out);
}

}  // namespace magcomp::sim
