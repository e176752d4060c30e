#include "magcomp/map_tools.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>

#include "magcomp/errors.hpp"
#include "magcomp/text_io.hpp"

namespace magcomp::map {

namespace {

void require_ascending_uniform(const std::vector<double>& axis, const char* name) {
  if (axis.size() < 2) {
    throw ValidationError(std::string("anomaly map: axis ") + name +
                          " needs at least 2 nodes");
  }
  const double step = axis[1] - axis[0];
  if (!(step > 0.0)) {
    throw ValidationError(std::string("anomaly map: axis ") + name +
                          " is not strictly ascending");
  }
  for (std::size_t i = 1; i < axis.size(); ++i) {
    const double d = axis[i] - axis[i - 1];
    if (!(d > 0.0) || std::abs(d - step) > 1e-6 * step) {
      throw ValidationError(std::string("anomaly map: axis ") + name +
                            " is not uniform within 1e-6");
    }
  }
}

// fftfreq-style signed frequency for index i of n samples.
double fft_freq(std::size_t i, std::size_t n, double spacing) {
  const auto si = static_cast<std::ptrdiff_t>(i);
  const auto sn = static_cast<std::ptrdiff_t>(n);
  const std::ptrdiff_t folded = si <= sn / 2 ? si : si - sn;
  return static_cast<double>(folded) / (static_cast<double>(sn) * spacing);
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

// exp(-k dz) spectral scaling on the r2c half-spectrum, in place.
void continue_spectrum(fftw_complex* spec, std::size_t ny, std::size_t nx,
                       double dx, double dy, double dz, double k_cut) {
  const std::size_t nxh = nx / 2 + 1;
  for (std::size_t j = 0; j < ny; ++j) {
    const double ky = 2.0 * std::numbers::pi * fft_freq(j, ny, dy);
    for (std::size_t i = 0; i < nxh; ++i) {
      const double kx = 2.0 * std::numbers::pi *
                        static_cast<double>(i) / (static_cast<double>(nx) * dx);
      const double k = std::sqrt(kx * kx + ky * ky);
      double factor;
      if (k_cut > 0.0 && k > k_cut) {
        factor = 0.0;
      } else {
        factor = std::exp(-k * dz);
      }
      spec[j * nxh + i][0] *= factor;
      spec[j * nxh + i][1] *= factor;
    }
  }
}

std::vector<double> continue_grid(const std::vector<double>& vals, std::size_t ny,
                                  std::size_t nx, double dx, double dy, double dz,
                                  double k_cut) {
  const std::size_t nxh = nx / 2 + 1;
  std::unique_ptr<double, FftwDeleter> real(
      static_cast<double*>(fftw_malloc(sizeof(double) * ny * nx)));
  std::unique_ptr<fftw_complex, FftwDeleter> spec(static_cast<fftw_complex*>(
      fftw_malloc(sizeof(fftw_complex) * ny * nxh)));

  std::copy(vals.begin(), vals.end(), real.get());
  fftw_plan fwd = fftw_plan_dft_r2c_2d(static_cast<int>(ny), static_cast<int>(nx),
                                       real.get(), spec.get(), FFTW_ESTIMATE);
  fftw_execute(fwd);
  fftw_destroy_plan(fwd);

  continue_spectrum(spec.get(), ny, nx, dx, dy, dz, k_cut);

  fftw_plan bwd = fftw_plan_dft_c2r_2d(static_cast<int>(ny), static_cast<int>(nx),
                                       spec.get(), real.get(), FFTW_ESTIMATE);
  fftw_execute(bwd);
  fftw_destroy_plan(bwd);

  std::vector<double> out(ny * nx);
  const double scale = 1.0 / static_cast<double>(ny * nx);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = real.get()[i] * scale;
  }
  return out;
}

}  // namespace

void AnomalyMap::validate() const {
  if (nx < 2 || ny < 2) {
    throw ValidationError("anomaly map: grid must be at least 2x2");
  }
  if (lon_deg.size() != nx || lat_deg.size() != ny) {
    throw ValidationError("anomaly map: axis lengths do not match grid shape");
  }
  if (values.size() != nx * ny) {
    throw ValidationError("anomaly map: value count does not match grid shape");
  }
  if (!(dx_m > 0.0) || !(dy_m > 0.0)) {
    throw ValidationError("anomaly map: grid spacings must be positive");
  }
  require_ascending_uniform(lon_deg, "lon");
  require_ascending_uniform(lat_deg, "lat");
}

std::vector<double> create_k(std::size_t ny, std::size_t nx, double dx_m, double dy_m) {
  if (nx < 2 || ny < 2) {
    throw ValidationError("create_k: grid must be at least 2x2");
  }
  if (!(dx_m > 0.0) || !(dy_m > 0.0)) {
    throw ValidationError("create_k: spacings must be positive");
  }
  std::vector<double> k(ny * nx);
  for (std::size_t j = 0; j < ny; ++j) {
    const double ky = 2.0 * std::numbers::pi * fft_freq(j, ny, dy_m);
    for (std::size_t i = 0; i < nx; ++i) {
      const double kx = 2.0 * std::numbers::pi * fft_freq(i, nx, dx_m);
      k[j * nx + i] = std::sqrt(kx * kx + ky * ky);
    }
  }
  return k;
}

AnomalyMap upward_fft(const AnomalyMap& map, double dz_m, const UpwardOptions& options) {
  map.validate();
  for (double v : map.values) {
    if (!std::isfinite(v)) {
      throw ValidationError("upward_fft: map contains NaN or infinity");
    }
  }
  if (dz_m < 0.0) {
    if (!options.allow_downward) {
      throw ValidationError(
          "upward_fft: downward continuation (dz < 0) amplifies noise and is "
          "disabled; pass allow_downward with a wavenumber cutoff");
    }
    if (!(options.k_cutoff_rad_m > 0.0)) {
      throw ValidationError(
          "upward_fft: downward continuation requires a positive wavenumber cutoff");
    }
  }
  const double k_cut = options.k_cutoff_rad_m;

  AnomalyMap out = map;
  out.alt_m = map.alt_m + dz_m;

  if (!options.mirror_pad) {
    out.values = continue_grid(map.values, map.ny, map.nx, map.dx_m, map.dy_m,
                               dz_m, k_cut);
    return out;
  }

  const std::size_t nx2 = 2 * map.nx;
  const std::size_t ny2 = 2 * map.ny;
  std::vector<double> big(nx2 * ny2);
  for (std::size_t j = 0; j < ny2; ++j) {
    const std::size_t jj = j < map.ny ? j : ny2 - 1 - j;
    for (std::size_t i = 0; i < nx2; ++i) {
      const std::size_t ii = i < map.nx ? i : nx2 - 1 - i;
      big[j * nx2 + i] = map.at(jj, ii);
    }
  }
  const std::vector<double> cont =
      continue_grid(big, ny2, nx2, map.dx_m, map.dy_m, dz_m, k_cut);
  for (std::size_t j = 0; j < map.ny; ++j) {
    for (std::size_t i = 0; i < map.nx; ++i) {
      out.at(j, i) = cont[j * nx2 + i];
    }
  }
  return out;
}

MapInterpolant::MapInterpolant(AnomalyMap source, InterpMethod method)
    : map_(std::move(source)), method_(method) {
  map_.validate();
  for (double v : map_.values) {
    if (!std::isfinite(v)) {
      throw ValidationError("map interpolant: map contains NaN or infinity");
    }
  }
}

double MapInterpolant::node(std::ptrdiff_t j, std::ptrdiff_t i) const {
  // Ghost nodes extend the grid linearly, one axis per recursion step;
  // keeps bicubic affine-exact at borders.
  const auto nx = static_cast<std::ptrdiff_t>(map_.nx);
  const auto ny = static_cast<std::ptrdiff_t>(map_.ny);
  if (j < 0) return 2.0 * node(0, i) - node(1, i);
  if (j >= ny) return 2.0 * node(ny - 1, i) - node(ny - 2, i);
  if (i < 0) return 2.0 * node(j, 0) - node(j, 1);
  if (i >= nx) return 2.0 * node(j, nx - 1) - node(j, nx - 2);
  return map_.at(static_cast<std::size_t>(j), static_cast<std::size_t>(i));
}

namespace {

// Catmull-Rom value and derivative on one axis, nodes p0..p3, t in [0,1].
double catmull_rom(double p0, double p1, double p2, double p3, double t) {
  const double c0 = 2.0 * p1;
  const double c1 = p2 - p0;
  const double c2 = 2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3;
  const double c3 = -p0 + 3.0 * p1 - 3.0 * p2 + p3;
  return 0.5 * (c0 + c1 * t + c2 * t * t + c3 * t * t * t);
}

double catmull_rom_deriv(double p0, double p1, double p2, double p3, double t) {
  const double c1 = p2 - p0;
  const double c2 = 2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3;
  const double c3 = -p0 + 3.0 * p1 - 3.0 * p2 + p3;
  return 0.5 * (c1 + 2.0 * c2 * t + 3.0 * c3 * t * t);
}

struct CellCoord {
  std::size_t i, j;  // lower-left node
  double tx, ty;     // fractional position in the cell
};

CellCoord locate(const AnomalyMap& m, double lon_deg, double lat_deg) {
  const double lon0 = m.lon_deg.front();
  const double lat0 = m.lat_deg.front();
  const double dlon = m.lon_deg[1] - m.lon_deg[0];
  const double dlat = m.lat_deg[1] - m.lat_deg[0];
  double fx = (lon_deg - lon0) / dlon;
  double fy = (lat_deg - lat0) / dlat;
  // Snap to the node when the query sits within round-off of it, so node
  // values are reproduced exactly.
  if (std::abs(fx - std::round(fx)) < 1e-9) fx = std::round(fx);
  if (std::abs(fy - std::round(fy)) < 1e-9) fy = std::round(fy);
  const double eps = 1e-12;
  if (fx < -eps || fx > static_cast<double>(m.nx - 1) + eps || fy < -eps ||
      fy > static_cast<double>(m.ny - 1) + eps) {
    throw ValidationError("map interpolant: query (" + io::format_double(lon_deg) +
                          ", " + io::format_double(lat_deg) +
                          ") outside the map bounding box");
  }
  CellCoord c;
  c.i = static_cast<std::size_t>(std::clamp(
      fx, 0.0, static_cast<double>(m.nx - 2)));
  c.j = static_cast<std::size_t>(std::clamp(
      fy, 0.0, static_cast<double>(m.ny - 2)));
  c.tx = fx - static_cast<double>(c.i);
  c.ty = fy - static_cast<double>(c.j);
  return c;
}

}  // namespace

double MapInterpolant::at(double lon_deg, double lat_deg) const {
  const CellCoord c = locate(map_, lon_deg, lat_deg);
  if (method_ == InterpMethod::bilinear) {
    const double v00 = map_.at(c.j, c.i);
    const double v01 = map_.at(c.j, c.i + 1);
    const double v10 = map_.at(c.j + 1, c.i);
    const double v11 = map_.at(c.j + 1, c.i + 1);
    const double a = v00 + (v01 - v00) * c.tx;
    const double b = v10 + (v11 - v10) * c.tx;
    return a + (b - a) * c.ty;
  }
  const auto j0 = static_cast<std::ptrdiff_t>(c.j);
  const auto i0 = static_cast<std::ptrdiff_t>(c.i);
  double rows[4];
  for (std::ptrdiff_t r = -1; r <= 2; ++r) {
    rows[r + 1] = catmull_rom(node(j0 + r, i0 - 1), node(j0 + r, i0),
                              node(j0 + r, i0 + 1), node(j0 + r, i0 + 2), c.tx);
  }
  return catmull_rom(rows[0], rows[1], rows[2], rows[3], c.ty);
}

std::array<double, 2> MapInterpolant::gradient(double lon_deg, double lat_deg) const {
  const CellCoord c = locate(map_, lon_deg, lat_deg);
  const double dlon = map_.lon_deg[1] - map_.lon_deg[0];
  const double dlat = map_.lat_deg[1] - map_.lat_deg[0];
  // Interior requirement: at least one full cell away from every edge.
  if (c.i < 1 || c.i + 2 >= map_.nx || c.j < 1 || c.j + 2 >= map_.ny) {
    throw ValidationError("map_grad: point within one cell of the map boundary");
  }

  double ddeg_lon, ddeg_lat;
  if (method_ == InterpMethod::bilinear) {
    const double v00 = map_.at(c.j, c.i);
    const double v01 = map_.at(c.j, c.i + 1);
    const double v10 = map_.at(c.j + 1, c.i);
    const double v11 = map_.at(c.j + 1, c.i + 1);
    ddeg_lon = ((v01 - v00) * (1.0 - c.ty) + (v11 - v10) * c.ty) / dlon;
    ddeg_lat = ((v10 - v00) * (1.0 - c.tx) + (v11 - v01) * c.tx) / dlat;
  } else {
    const auto j0 = static_cast<std::ptrdiff_t>(c.j);
    const auto i0 = static_cast<std::ptrdiff_t>(c.i);
    double rows[4], drows[4];
    for (std::ptrdiff_t r = -1; r <= 2; ++r) {
      rows[r + 1] = catmull_rom(node(j0 + r, i0 - 1), node(j0 + r, i0),
                                node(j0 + r, i0 + 1), node(j0 + r, i0 + 2), c.tx);
      drows[r + 1] = catmull_rom_deriv(node(j0 + r, i0 - 1), node(j0 + r, i0),
                                       node(j0 + r, i0 + 1), node(j0 + r, i0 + 2), c.tx);
    }
    ddeg_lon = catmull_rom(drows[0], drows[1], drows[2], drows[3], c.ty) / dlon;
    ddeg_lat = catmull_rom_deriv(rows[0], rows[1], rows[2], rows[3], c.ty) / dlat;
  }
  const double deg_per_rad = 180.0 / std::numbers::pi;
  return {ddeg_lon * deg_per_rad, ddeg_lat * deg_per_rad};
}

AnomalyMap load_map(const std::filesystem::path& path) {
  std::istringstream in(io::read_text(path));
  const std::string ctx = "map file " + path.string();
  AnomalyMap m;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(ctx + ": empty file");
  {
    std::istringstream head(line);
    double nx_d = 0, ny_d = 0;
    if (!(head >> nx_d >> ny_d >> m.alt_m >> m.dx_m >> m.dy_m)) {
      throw ValidationError(ctx + ": malformed header line");
    }
    m.nx = static_cast<std::size_t>(nx_d);
    m.ny = static_cast<std::size_t>(ny_d);
  }
  auto read_row = [&](std::size_t count, const std::string& what) {
    if (!std::getline(in, line)) {
      throw ValidationError(ctx + ": missing " + what);
    }
    std::istringstream row(line);
    std::vector<double> vals;
    vals.reserve(count);
    std::string tok;
    while (row >> tok) vals.push_back(io::parse_double(tok, ctx + ": " + what));
    if (vals.size() != count) {
      throw ValidationError(ctx + ": " + what + " has " +
                            std::to_string(vals.size()) + " values, expected " +
                            std::to_string(count));
    }
    return vals;
  };
  m.lon_deg = read_row(m.nx, "longitude axis");
  m.lat_deg = read_row(m.ny, "latitude axis");
  m.values.reserve(m.nx * m.ny);
  for (std::size_t j = 0; j < m.ny; ++j) {
    const std::vector<double> row = read_row(m.nx, "row " + std::to_string(j));
    m.values.insert(m.values.end(), row.begin(), row.end());
  }
  m.validate();
  return m;
}

void save_map(const AnomalyMap& m, const std::filesystem::path& path) {
  m.validate();
  std::string out;
  out += std::to_string(m.nx) + " " + std::to_string(m.ny) + " " +
         io::format_double(m.alt_m) + " " + io::format_double(m.dx_m) + " " +
         io::format_double(m.dy_m) + "\n";
  auto append_row = [&out](const double* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i) out += ' ';
      out += io::format_double(v[i]);
    }
    out += '\n';
  };
  append_row(m.lon_deg.data(), m.nx);
  append_row(m.lat_deg.data(), m.ny);
  for (std::size_t j = 0; j < m.ny; ++j) {
    append_row(m.values.data() + j * m.nx, m.nx);
  }
  io::write_text_atomic(path, out);
}

}  // namespace magcomp::map
