#include "magcomp/tolles_lawson.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "magcomp/errors.hpp"
#include "magcomp/text_io.hpp"

namespace magcomp::tl {

namespace {

constexpr double kRankTol = 1e-10;  // relative singular-value cutoff
constexpr int kMinObservableRank = 17;

void require_equal_lengths(std::initializer_list<std::size_t> sizes,
                           const char* op) {
  const std::size_t n = *sizes.begin();
  for (std::size_t s : sizes) {
    if (s != n) throw ValidationError(std::string(op) + ": length mismatch");
  }
}

void require_finite(std::span<const double> x, const char* op) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw ValidationError(std::string(op) + ": input contains NaN or infinity");
    }
  }
}

}  // namespace

Eigen::MatrixX3d direction_cosines(std::span<const double> bx,
                                   std::span<const double> by,
                                   std::span<const double> bz) {
  require_equal_lengths({bx.size(), by.size(), bz.size()}, "direction_cosines");
  require_finite(bx, "direction_cosines");
  require_finite(by, "direction_cosines");
  require_finite(bz, "direction_cosines");
  const std::size_t n = bx.size();
  Eigen::MatrixX3d u(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = std::sqrt(bx[i] * bx[i] + by[i] * by[i] + bz[i] * bz[i]);
    if (!(norm > 0.0)) {
      throw ValidationError("direction_cosines: zero-magnitude flux sample at index " +
                            std::to_string(i));
    }
    u(static_cast<Eigen::Index>(i), 0) = bx[i] / norm;
    u(static_cast<Eigen::Index>(i), 1) = by[i] / norm;
    u(static_cast<Eigen::Index>(i), 2) = bz[i] / norm;
  }
  return u;
}

Eigen::MatrixXd build_design_matrix(const Eigen::MatrixX3d& u) {
  const Eigen::Index n = u.rows();
  if (n < 3) {
    throw ValidationError("build_design_matrix: need at least 3 samples");
  }
  Eigen::MatrixX3d du(n, 3);
  for (int c = 0; c < 3; ++c) {
    const std::vector<double> col(u.col(c).data(), u.col(c).data() + n);
    const std::vector<double> g = signal::central_fdm(col);
    for (Eigen::Index i = 0; i < n; ++i) du(i, c) = g[static_cast<std::size_t>(i)];
  }

  Eigen::MatrixXd d(n, kTerms);
  d.col(0) = u.col(0);
  d.col(1) = u.col(1);
  d.col(2) = u.col(2);
  int col = kPermanentTerms;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      d.col(col++) = u.col(i).cwiseProduct(u.col(j));
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      d.col(col++) = du.col(i).cwiseProduct(u.col(j));
    }
  }
  return d;
}

TLCoefficients fit_coefficients(std::span<const double> scalar_mag,
                                std::span<const double> flux_x,
                                std::span<const double> flux_y,
                                std::span<const double> flux_z,
                                const signal::BandpassSpec& band,
                                double ridge_lambda,
                                FitDiagnostics* diagnostics) {
  require_equal_lengths(
      {scalar_mag.size(), flux_x.size(), flux_y.size(), flux_z.size()},
      "fit_coefficients");
  if (scalar_mag.size() <= 50) {
    throw ValidationError("fit_coefficients: need more than 50 samples");
  }
  if (ridge_lambda < 0.0) {
    throw ValidationError("fit_coefficients: ridge lambda must be nonnegative");
  }
  require_finite(scalar_mag, "fit_coefficients");

  const Eigen::MatrixX3d u = direction_cosines(flux_x, flux_y, flux_z);
  const Eigen::MatrixXd delta = build_design_matrix(u);
  const Eigen::Index n = delta.rows();

  // Band-limit features and measurement alike; the earth-field projection is
  // assumed to vanish in the calibration band.
  Eigen::MatrixXd d(n, kTerms);
  std::vector<double> buf(static_cast<std::size_t>(n));
  for (int c = 0; c < kTerms; ++c) {
    for (Eigen::Index i = 0; i < n; ++i) buf[static_cast<std::size_t>(i)] = delta(i, c);
    const std::vector<double> f = signal::bandpass(buf, band);
    for (Eigen::Index i = 0; i < n; ++i) d(i, c) = f[static_cast<std::size_t>(i)];
  }
  const std::vector<double> yv =
      signal::bandpass({scalar_mag.data(), scalar_mag.size()}, band);
  const Eigen::Map<const Eigen::VectorXd> y(yv.data(), n);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double sigma_max = sigma(0);
  const double sigma_min = sigma(kTerms - 1);
  const double condition =
      sigma_min > 0.0 ? sigma_max / sigma_min : std::numeric_limits<double>::infinity();

  // Rank threshold against the unfiltered feature scale: a direction only
  // counts as excited when the maneuvers put band-limited energy into it.
  // Judging against sigma_max of the filtered matrix would pass a constant
  // flight, where every "singular value" is filter round-off.
  const double threshold = kRankTol * delta.norm();
  int rank = 0;
  for (int i = 0; i < kTerms; ++i) {
    if (sigma(i) >= threshold) ++rank;
  }

  TLCoefficients out;
  out.band = band;
  out.ridge_lambda = ridge_lambda;

  const Eigen::VectorXd uty = svd.matrixU().transpose() * y;
  if (ridge_lambda == 0.0) {
    if (rank < kMinObservableRank) {
      std::ostringstream msg;
      msg << "fit_coefficients: design matrix is singular in the calibration band "
          << "(effective rank " << rank << " of " << kTerms
          << ", condition estimate " << condition
          << "); the maneuvers are degenerate, or pass ridge lambda > 0";
      throw NumericalError(msg.str());
    }
    Eigen::VectorXd scaled = Eigen::VectorXd::Zero(kTerms);
    for (int i = 0; i < kTerms; ++i) {
      if (sigma(i) >= threshold) scaled(i) = uty(i) / sigma(i);
    }
    out.theta = svd.matrixV() * scaled;
  } else {
    Eigen::VectorXd scaled(kTerms);
    for (int i = 0; i < kTerms; ++i) {
      scaled(i) = sigma(i) * uty(i) / (sigma(i) * sigma(i) + ridge_lambda);
    }
    out.theta = svd.matrixV() * scaled;
  }

  if (diagnostics != nullptr) {
    diagnostics->condition = condition;
    diagnostics->effective_rank = rank;
    diagnostics->residual_rms =
        std::sqrt((y - d * out.theta).squaredNorm() / static_cast<double>(n));
  }
  return out;
}

std::vector<double> predict_aircraft_field(const TLCoefficients& coeffs,
                                           std::span<const double> flux_x,
                                           std::span<const double> flux_y,
                                           std::span<const double> flux_z) {
  if (coeffs.theta.size() != kTerms) {
    throw ValidationError("predict_aircraft_field: coefficient vector must have 18 terms");
  }
  const Eigen::MatrixX3d u = direction_cosines(flux_x, flux_y, flux_z);
  const Eigen::MatrixXd delta = build_design_matrix(u);
  const Eigen::VectorXd h = delta * coeffs.theta;
  return {h.data(), h.data() + h.size()};
}

std::vector<double> compensate(const TLCoefficients& coeffs,
                               std::span<const double> scalar_mag,
                               std::span<const double> flux_x,
                               std::span<const double> flux_y,
                               std::span<const double> flux_z) {
  require_equal_lengths(
      {scalar_mag.size(), flux_x.size(), flux_y.size(), flux_z.size()},
      "compensate");
  require_finite(scalar_mag, "compensate");
  std::vector<double> out = predict_aircraft_field(coeffs, flux_x, flux_y, flux_z);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = scalar_mag[i] - out[i];
  }
  return out;
}

void save_coefficients(const TLCoefficients& coeffs,
                       const std::filesystem::path& path) {
  if (coeffs.theta.size() != kTerms) {
    throw ValidationError("save_coefficients: coefficient vector must have 18 terms");
  }
  std::string out;
  out += "lambda=" + io::format_double(coeffs.ridge_lambda) + "\n";
  out += "pass1=" + io::format_double(coeffs.band.pass1_hz) + "\n";
  out += "pass2=" + io::format_double(coeffs.band.pass2_hz) + "\n";
  out += "fs=" + io::format_double(coeffs.band.fs_hz) + "\n";
  for (int i = 0; i < kTerms; ++i) {
    out += std::string(kTermLabels[static_cast<std::size_t>(i)]) + "," +
           io::format_double(coeffs.theta(i)) + "\n";
  }
  io::write_text_atomic(path, out);
}

TLCoefficients load_coefficients(const std::filesystem::path& path) {
  std::istringstream in(io::read_text(path));
  const std::string ctx = "coefficient file " + path.string();

  TLCoefficients coeffs;
  std::string line;
  const char* headers[] = {"lambda=", "pass1=", "pass2=", "fs="};
  double* slots[] = {&coeffs.ridge_lambda, &coeffs.band.pass1_hz,
                     &coeffs.band.pass2_hz, &coeffs.band.fs_hz};
  for (int h = 0; h < 4; ++h) {
    if (!std::getline(in, line) || line.rfind(headers[h], 0) != 0) {
      throw ValidationError(ctx + ": expected header line " + headers[h]);
    }
    *slots[h] = io::parse_double(line.substr(std::string(headers[h]).size()), ctx);
  }
  for (int i = 0; i < kTerms; ++i) {
    if (!std::getline(in, line)) {
      throw ValidationError(ctx + ": expected 18 coefficient lines");
    }
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw ValidationError(ctx + ": malformed coefficient line '" + line + "'");
    }
    const std::string label = line.substr(0, comma);
    if (label != kTermLabels[static_cast<std::size_t>(i)]) {
      throw ValidationError(ctx + ": term " + std::to_string(i + 1) + " labeled '" +
                            label + "', expected '" +
                            std::string(kTermLabels[static_cast<std::size_t>(i)]) + "'");
    }
    coeffs.theta(i) = io::parse_double(line.substr(comma + 1), ctx);
  }
  coeffs.band.validate();
  return coeffs;
}

}  // namespace magcomp::tl
