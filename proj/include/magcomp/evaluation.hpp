#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "magcomp/flight_data.hpp"
#include "magcomp/map_tools.hpp"
#include "magcomp/tolles_lawson.hpp"

namespace magcomp::eval {

enum class TruthSource { stinger, map };

struct EvalReport {
  std::string channel;
  TruthSource truth_source{TruthSource::stinger};
  std::size_t n_samples{0};
  double rmse_nt{0.0};
  double rmse_detrended_nt{0.0};
};

/// sqrt(mean((a-b)^2)); lengths must match and be NaN-free.
double rmse(std::span<const double> a, std::span<const double> b);

/// RMSE after removing the affine trend of the residual candidate - truth.
double rmse_detrended(std::span<const double> candidate,
                      std::span<const double> truth);

struct EvalOptions {
  TruthSource truth_source{TruthSource::stinger};
  /// Interpolated map truth along LAT/LONG; required for TruthSource::map.
  const map::MapInterpolant* anomaly{nullptr};
  /// Core-field magnitude added to the map anomaly so map truth and scalar
  /// measurements share a baseline (detrended scores are unaffected).
  double core_field_nt{0.0};
  /// Fluxgate channel prefix used for compensation features ("FLUXB" etc).
  std::string flux_prefix{"FLUXB"};
  /// Detrend candidate and truth separately instead of their residual.
  bool per_series_detrend{false};
};

/**
 * @brief Scores magnetometer channels against the chosen truth signal.
 *
 * Channels mapped to coefficients are compensated first; channels mapped to
 * nullopt are scored raw. Reports come back sorted by channel name.
 */
std::vector<EvalReport> evaluate_flight(
    const flight::FlightFrame& frame,
    const std::map<std::string, std::optional<tl::TLCoefficients>>& coeffs_by_channel,
    const EvalOptions& options);

/// Report CSV: channel,truth_source,n,rmse_nT,rmse_detrended_nT.
void write_report_csv(const std::vector<EvalReport>& reports,
                      const std::filesystem::path& path);

/// Minimal SVG of detrended truth vs compensated traces.
void write_plot_svg(const flight::FlightFrame& frame,
                    const std::vector<double>& truth,
                    const std::map<std::string, std::vector<double>>& traces,
                    const std::filesystem::path& path);

}  // namespace magcomp::eval
