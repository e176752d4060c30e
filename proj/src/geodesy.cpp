#include "magcomp/geodesy.hpp"

#include <cmath>
#include <numbers>

#include "magcomp/errors.hpp"

namespace magcomp::geo {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kPoleGuard = 1e-9;

void require_latitude(double lat_rad) {
  if (!std::isfinite(lat_rad) || std::abs(lat_rad) > kHalfPi) {
    throw ValidationError("geodesy: latitude outside [-pi/2, pi/2]");
  }
}

}  // namespace

double meridian_radius_m(double lat_rad, const Ellipsoid& e) {
  const double s = std::sin(lat_rad);
  const double w = 1.0 - e.ecc_sq * s * s;
  return e.semi_major_m * (1.0 - e.ecc_sq) / (w * std::sqrt(w));
}

double prime_vertical_radius_m(double lat_rad, const Ellipsoid& e) {
  const double s = std::sin(lat_rad);
  return e.semi_major_m / std::sqrt(1.0 - e.ecc_sq * s * s);
}

double delta_north(double dlat_rad, double lat_rad, const Ellipsoid& e) {
  require_latitude(lat_rad);
  return dlat_rad * meridian_radius_m(lat_rad, e);
}

double delta_east(double dlon_rad, double lat_rad, const Ellipsoid& e) {
  require_latitude(lat_rad);
  return dlon_rad * prime_vertical_radius_m(lat_rad, e) * std::cos(lat_rad);
}

double delta_lat(double dnorth_m, double lat_rad, const Ellipsoid& e) {
  require_latitude(lat_rad);
  return dnorth_m / meridian_radius_m(lat_rad, e);
}

double delta_lon(double deast_m, double lat_rad, const Ellipsoid& e) {
  require_latitude(lat_rad);
  if (kHalfPi - std::abs(lat_rad) < kPoleGuard) {
    throw ValidationError("delta_lon: east-west scale vanishes at the poles");
  }
  return deast_m / (prime_vertical_radius_m(lat_rad, e) * std::cos(lat_rad));
}

}  // namespace magcomp::geo
