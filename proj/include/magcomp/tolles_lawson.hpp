#pragma once

#include <Eigen/Dense>
#include <array>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "magcomp/signal.hpp"

namespace magcomp::tl {

/// Column labels of the 18-term design matrix: 3 permanent, 6 induced
/// (upper triangle, i <= j), 9 eddy (row-major over (i,j), primes mark the
/// per-sample derivative factor). Coefficient files must match these labels
/// in this order.
inline constexpr std::array<std::string_view, 18> kTermLabels = {
    "u1",    "u2",    "u3",
    "u1u1",  "u1u2",  "u1u3",  "u2u2",  "u2u3",  "u3u3",
    "u1'u1", "u1'u2", "u1'u3", "u2'u1", "u2'u2", "u2'u3",
    "u3'u1", "u3'u2", "u3'u3"};

constexpr int kPermanentTerms = 3;
constexpr int kInducedTerms = 6;
constexpr int kEddyTerms = 9;
constexpr int kTerms = 18;

/// Per-sample unit vectors of the measured field in the body frame, N x 3.
/// Rows are (cos X, cos Y, cos Z) and have unit norm by construction.
Eigen::MatrixX3d direction_cosines(std::span<const double> bx,
                                   std::span<const double> by,
                                   std::span<const double> bz);

/// N x 18 Tolles-Lawson design matrix over direction cosines; derivative
/// features use central_fdm per component (per-sample spacing, no fs factor).
Eigen::MatrixXd build_design_matrix(const Eigen::MatrixX3d& u);

/// The 18 fitted coefficients together with the band and ridge parameter
/// they were estimated under.
struct TLCoefficients {
  Eigen::VectorXd theta{Eigen::VectorXd::Zero(kTerms)};
  double ridge_lambda{0.0};
  signal::BandpassSpec band{};
};

/// Solver diagnostics from the coefficient fit.
struct FitDiagnostics {
  double condition{0.0};    // sigma_max / sigma_min of the filtered design matrix
  int effective_rank{0};    // singular values above 1e-10 * ||unfiltered design||_F
  double residual_rms{0.0}; // RMS of y - D theta in the calibration band
};

/**
 * @brief Estimates the 18 Tolles-Lawson coefficients from a calibration flight.
 *
 * The design matrix and the scalar measurement are bandpass filtered, then
 * theta solves the (optionally ridge-regularized) least-squares problem via
 * SVD. With ridge_lambda == 0 the direction-cosine identity makes one
 * coefficient direction unobservable; that direction is truncated and the
 * minimum-norm solution returned. An effective rank below 17 means the
 * maneuvers do not excite the model and raises NumericalError with the
 * condition estimate in the message.
 */
TLCoefficients fit_coefficients(std::span<const double> scalar_mag,
                                std::span<const double> flux_x,
                                std::span<const double> flux_y,
                                std::span<const double> flux_z,
                                const signal::BandpassSpec& band,
                                double ridge_lambda = 0.0,
                                FitDiagnostics* diagnostics = nullptr);

/// Aircraft-field prediction Delta(u) * theta on unfiltered features.
std::vector<double> predict_aircraft_field(const TLCoefficients& coeffs,
                                           std::span<const double> flux_x,
                                           std::span<const double> flux_y,
                                           std::span<const double> flux_z);

/// scalar_mag minus the predicted aircraft field.
std::vector<double> compensate(const TLCoefficients& coeffs,
                               std::span<const double> scalar_mag,
                               std::span<const double> flux_x,
                               std::span<const double> flux_y,
                               std::span<const double> flux_z);

/// Coefficient file: "lambda=", "pass1=", "pass2=", "fs=" header lines, then
/// 18 "label,value" lines in kTermLabels order.
void save_coefficients(const TLCoefficients& coeffs,
                       const std::filesystem::path& path);
TLCoefficients load_coefficients(const std::filesystem::path& path);

}  // namespace magcomp::tl
