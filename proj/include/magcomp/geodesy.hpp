#pragma once

namespace magcomp::geo {

/// WGS-84 reference ellipsoid (semi-major axis, first eccentricity squared).
struct Ellipsoid {
  double semi_major_m{6378137.0};
  double ecc_sq{6.69437999014e-3};
};

inline constexpr Ellipsoid kWgs84{};

/// Meridian radius of curvature M(lat) = a(1-e^2)/(1-e^2 sin^2 lat)^(3/2).
double meridian_radius_m(double lat_rad, const Ellipsoid& e = kWgs84);

/// Prime-vertical radius of curvature N(lat) = a/sqrt(1-e^2 sin^2 lat).
double prime_vertical_radius_m(double lat_rad, const Ellipsoid& e = kWgs84);

/// Latitude error (rad) to north-south position error (m).
double delta_north(double dlat_rad, double lat_rad, const Ellipsoid& e = kWgs84);

/// Longitude error (rad) to east-west position error (m).
double delta_east(double dlon_rad, double lat_rad, const Ellipsoid& e = kWgs84);

/// North-south position error (m) to latitude error (rad).
double delta_lat(double dnorth_m, double lat_rad, const Ellipsoid& e = kWgs84);

/// East-west position error (m) to longitude error (rad). Rejects latitudes
/// within 1e-9 rad of the poles, where the east-west scale vanishes.
double delta_lon(double deast_m, double lat_rad, const Ellipsoid& e = kWgs84);

}  // namespace magcomp::geo
