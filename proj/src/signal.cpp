#include "magcomp/signal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "magcomp/errors.hpp"

namespace magcomp::signal {

namespace {

void require_finite(std::span<const double> x, const char* op) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw ValidationError(std::string(op) + ": input contains NaN or infinity");
    }
  }
}

// Steady-state section states for a constant input u, direct form II transposed:
//   y      = b0*u + s0
//   s0'    = b1*u - a1*y + s1
//   s1'    = b2*u - a2*y
struct SectionState {
  double s0, s1;
};

SectionState steady_state(const Biquad& q, double u) {
  const double denom = 1.0 + q.a1 + q.a2;
  const double y = (q.b0 + q.b1 + q.b2) / denom * u;
  const double s1 = q.b2 * u - q.a2 * y;
  const double s0 = q.b1 * u - q.a1 * y + s1;
  return {s0, s1};
}

double dc_gain(const Biquad& q) {
  return (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
}

void run_cascade(const std::vector<Biquad>& sections, std::vector<double>& x) {
  // Initial conditions make each section start at its stationary response to
  // a step of amplitude x[0], so constants map to their DC gain immediately.
  double level = x.empty() ? 0.0 : x.front();
  for (const Biquad& q : sections) {
    SectionState st = steady_state(q, level);
    for (double& v : x) {
      const double y = q.b0 * v + st.s0;
      st.s0 = q.b1 * v - q.a1 * y + st.s1;
      st.s1 = q.b2 * v - q.a2 * y;
      v = y;
    }
    level *= dc_gain(q);
  }
}

}  // namespace

void BandpassSpec::validate() const {
  if (!(fs_hz > 0.0)) {
    throw ValidationError("bandpass: sample rate must be positive");
  }
  if (!(pass1_hz > 0.0 && pass1_hz < pass2_hz && pass2_hz < fs_hz / 2.0)) {
    throw ValidationError("bandpass: need 0 < pass1 < pass2 < fs/2");
  }
  if (order <= 0 || order % 2 != 0) {
    throw ValidationError("bandpass: order must be a positive even integer");
  }
}

std::vector<Biquad> design_butterworth_bandpass(const BandpassSpec& spec) {
  spec.validate();
  using cplx = std::complex<double>;
  const double fs2 = 2.0 * spec.fs_hz;
  const double w1 = fs2 * std::tan(std::numbers::pi * spec.pass1_hz / spec.fs_hz);
  const double w2 = fs2 * std::tan(std::numbers::pi * spec.pass2_hz / spec.fs_hz);
  const double bw = w2 - w1;
  const double w0_sq = w1 * w2;

  const int m = spec.order / 2;  // lowpass prototype order
  std::vector<cplx> z_poles;
  z_poles.reserve(2 * static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const double angle = std::numbers::pi * (2.0 * k + m + 1.0) / (2.0 * m);
    const cplx proto = std::polar(1.0, angle);
    const cplx bp = bw * proto;
    const cplx disc = std::sqrt(bp * bp - 4.0 * w0_sq);
    for (const cplx s : {(bp + disc) / 2.0, (bp - disc) / 2.0}) {
      z_poles.push_back((fs2 + s) / (fs2 - s));
    }
  }

  // Pair conjugate poles into real biquads; real poles (odd prototype halves)
  // pair among themselves.
  std::vector<Biquad> sections;
  std::vector<double> real_poles;
  for (const cplx& z : z_poles) {
    if (z.imag() > 1e-14) {
      sections.push_back({1.0, 0.0, -1.0, -2.0 * z.real(), std::norm(z)});
    } else if (std::abs(z.imag()) <= 1e-14) {
      real_poles.push_back(z.real());
    }
  }
  std::sort(real_poles.begin(), real_poles.end());
  for (std::size_t i = 0; i + 1 < real_poles.size(); i += 2) {
    const double z1 = real_poles[i];
    const double z2 = real_poles[i + 1];
    sections.push_back({1.0, 0.0, -1.0, -(z1 + z2), z1 * z2});
  }

  // Unit gain at the (warped) geometric center frequency.
  const double theta_c = 2.0 * std::atan(std::sqrt(w0_sq) / fs2);
  const cplx zc = std::polar(1.0, theta_c);
  cplx h{1.0, 0.0};
  for (const Biquad& q : sections) {
    h *= (zc * zc - 1.0) / (zc * zc + q.a1 * zc + q.a2);
  }
  const double gain = 1.0 / std::abs(h);
  sections.front().b0 *= gain;
  sections.front().b1 *= gain;
  sections.front().b2 *= gain;
  return sections;
}

std::vector<double> bandpass(std::span<const double> x, const BandpassSpec& spec) {
  spec.validate();
  const std::size_t pad = 3 * static_cast<std::size_t>(spec.order);
  if (x.size() <= pad) {
    throw ValidationError("bandpass: input shorter than 3*order+1 samples");
  }
  require_finite(x, "bandpass");

  const std::vector<Biquad> sections = design_butterworth_bandpass(spec);
  const std::size_t n = x.size();

  // Odd reflection at both ends: 2*edge - mirrored interior.
  std::vector<double> ext(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) {
    ext[i] = 2.0 * x[0] - x[pad - i];
    ext[n + pad + i] = 2.0 * x[n - 1] - x[n - 2 - i];
  }
  std::copy(x.begin(), x.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));

  // Both pass orders (forward-backward and backward-forward) carry the same
  // zero-phase response but mirrored edge transients; their average commutes
  // with time reversal exactly.
  std::vector<double> fb = ext;
  run_cascade(sections, fb);
  std::reverse(fb.begin(), fb.end());
  run_cascade(sections, fb);
  std::reverse(fb.begin(), fb.end());

  std::vector<double> bf = ext;
  std::reverse(bf.begin(), bf.end());
  run_cascade(sections, bf);
  std::reverse(bf.begin(), bf.end());
  run_cascade(sections, bf);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = 0.5 * (fb[pad + i] + bf[pad + i]);
  }
  return out;
}

std::vector<double> central_fdm(std::span<const double> x) {
  if (x.size() < 3) {
    throw ValidationError("central_fdm: need at least 3 samples");
  }
  require_finite(x, "central_fdm");
  const std::size_t n = x.size();
  std::vector<double> g(n);
  g[0] = x[1] - x[0];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    g[i] = (x[i + 1] - x[i - 1]) / 2.0;
  }
  g[n - 1] = x[n - 1] - x[n - 2];
  return g;
}

std::vector<double> detrend(std::span<const double> x) {
  if (x.size() < 2) {
    throw ValidationError("detrend: need at least 2 samples");
  }
  require_finite(x, "detrend");
  const std::size_t n = x.size();
  // Least-squares affine fit over the sample index.
  const double mean_i = (n - 1) / 2.0;
  double mean_x = 0.0;
  for (double v : x) mean_x += v;
  mean_x /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double di = static_cast<double>(i) - mean_i;
    sxx += di * di;
    sxy += di * (x[i] - mean_x);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = x[i] - mean_x - slope * (static_cast<double>(i) - mean_i);
  }
  return out;
}

}  // namespace magcomp::signal
