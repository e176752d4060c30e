#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

namespace magcomp::map {

/**
 * @brief Regular lat/lon grid of magnetic anomaly values (nT).
 *
 * `values` is row-major with latitude as the slow axis: values[j*nx + i]
 * sits at (lat_deg[j], lon_deg[i]). Axis vectors are strictly ascending and
 * uniform; grid spacings in meters are stored, not derived from degrees.
 */
struct AnomalyMap {
  std::size_t nx{0};
  std::size_t ny{0};
  std::vector<double> values;
  std::vector<double> lon_deg;
  std::vector<double> lat_deg;
  double dx_m{0.0};
  double dy_m{0.0};
  double alt_m{0.0};

  double at(std::size_t j, std::size_t i) const { return values[j * nx + i]; }
  double& at(std::size_t j, std::size_t i) { return values[j * nx + i]; }

  /// Throws ValidationError on axis/shape/NaN violations.
  void validate() const;
};

/// Radial angular wavenumber grid |k| (rad/m), ny x nx row-major, built from
/// the standard discrete Fourier frequencies for the given spacings.
std::vector<double> create_k(std::size_t ny, std::size_t nx, double dx_m, double dy_m);

struct UpwardOptions {
  /// Mirror-pad the grid to twice its size before the transform, reducing
  /// wraparound at the cost of 4x work.
  bool mirror_pad{false};
  /// Permit dz < 0 (downward continuation). Requires k_cutoff_rad_m > 0;
  /// wavenumbers above the cutoff are zeroed instead of amplified.
  bool allow_downward{false};
  double k_cutoff_rad_m{0.0};
};

/// Continues the map upward by dz_m: values -> ifft(fft(values) * exp(-k dz)),
/// reference altitude raised by dz_m, axes unchanged.
AnomalyMap upward_fft(const AnomalyMap& map, double dz_m,
                      const UpwardOptions& options = {});

enum class InterpMethod { bilinear, bicubic };

/**
 * @brief Interpolating surrogate over an anomaly map's bounding box.
 *
 * Bilinear reproduces node values exactly; bicubic (Catmull-Rom with linear
 * ghost extrapolation at the borders) reproduces nodes and affine fields.
 * Gradients are analytic derivatives of the interpolant, reported per radian.
 */
class MapInterpolant {
 public:
  MapInterpolant(AnomalyMap source, InterpMethod method);

  /// Interpolated anomaly (nT); throws on out-of-bounds queries.
  double at(double lon_deg, double lat_deg) const;

  /// (d/dlon, d/dlat) in nT/rad; the point must be at least one cell away
  /// from the bounding box.
  std::array<double, 2> gradient(double lon_deg, double lat_deg) const;

  const AnomalyMap& source() const { return map_; }
  InterpMethod method() const { return method_; }

 private:
  double node(std::ptrdiff_t j, std::ptrdiff_t i) const;  // linear ghost extension

  AnomalyMap map_;
  InterpMethod method_;
};

/// Text map format: "nx ny alt_m dx_m dy_m", lon vector line, lat vector
/// line, then ny rows of nx values.
AnomalyMap load_map(const std::filesystem::path& path);
void save_map(const AnomalyMap& map, const std::filesystem::path& path);

}  // namespace magcomp::map
