#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "magcomp/flight_data.hpp"
#include "magcomp/map_tools.hpp"

namespace magcomp::sim {

/**
 * @brief Box calibration pattern: n_legs headings per circuit, repeated in
 * the opposite direction, with sinusoidal roll/pitch/yaw maneuvers along
 * each leg and banked smooth turns between legs.
 *
 * The configured amplitudes drive the primary sinusoid per axis; a second
 * harmonic at a quarter of the amplitude and fixed frequency ratios fills
 * out the calibration band so all coefficient directions stay excited.
 */
struct BoxPattern {
  double leg_length_s{75.0};
  int n_legs{4};
  int repeats{2};
  double roll_amp_deg{24.0};
  double pitch_amp_deg{20.0};
  double yaw_amp_deg{15.0};
  double maneuver_freq_hz{0.25};
  double turn_time_s{10.0};
};

/// One simulated scalar magnetometer: its coefficient vector and an optional
/// body-fixed disturbance vector. The disturbance is switched on and off at
/// an in-band rate, giving interference the Tolles-Lawson terms cannot
/// express (a constant vector would be absorbed by them).
struct SensorSpec {
  std::string name{"UNCOMPMAG1"};
  Eigen::VectorXd theta{Eigen::VectorXd::Zero(18)};
  Eigen::Vector3d disturbance_nt{0.0, 0.0, 0.0};
};

/// Straight survey track through a map, constant altitude.
struct Track {
  double lon_start_deg{0.0};
  double lat_start_deg{0.0};
  double lon_end_deg{0.0};
  double lat_end_deg{0.0};
  double alt_m{0.0};
};

struct SimConfig {
  /// Earth field vector in the navigation frame (north, west, up), nT.
  Eigen::Vector3d earth_field_nt{26500.0, 0.0, -45899.0};
  BoxPattern pattern{};
  double fs_hz{10.0};
  double scalar_sigma_nt{0.0};
  double flux_sigma_nt{0.0};
  std::uint64_t seed{1};
  double line_id{1002.02};
  std::vector<SensorSpec> sensors;

  // Survey-line mode, used when `track` is set: straight and level flight
  // with small maneuvers, anomaly sampled along the track.
  bool has_track{false};
  Track track{};
  std::string map_path{};

  void validate() const;
};

/// Ground truth backing a simulated frame. Aircraft-field truth is stored
/// for every sensor, first sensor first.
struct SimTruth {
  Eigen::MatrixX3d attitude_deg;  // roll, pitch, yaw per sample
  std::vector<double> h_et_true;
  std::vector<std::vector<double>> h_at_true;
  Eigen::MatrixX3d flux_true;
};

/// Plausible default coefficient vector; the induced diagonal is traceless,
/// so the vector lies entirely in the observable subspace of the fit.
Eigen::VectorXd default_theta();

/// Forward-models a calibration flight over a gradient-free region.
std::pair<flight::FlightFrame, SimTruth> simulate_flight(const SimConfig& cfg);

/// Forward-models a straight survey line over an anomaly map; the anomaly
/// interpolated along the track adds to the core-field magnitude.
std::pair<flight::FlightFrame, SimTruth> simulate_survey_line(
    const SimConfig& cfg, const map::MapInterpolant& anomaly);

/// Flat key=value config file mirroring SimConfig (see README for keys).
SimConfig load_sim_config(const std::filesystem::path& path);

/// Truth file: TIME, H_ET_TRUE, then H_AT_<sensor> per sensor.
void save_truth(const SimTruth& truth, const std::vector<std::string>& sensor_names,
                double fs_hz, const std::filesystem::path& path);

}  // namespace magcomp::sim
