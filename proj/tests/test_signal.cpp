#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "magcomp/errors.hpp"
#include "magcomp/signal.hpp"
#include "test_support.hpp"

using namespace magcomp;
using namespace test_support;

namespace {
const signal::BandpassSpec kCalBand{0.1, 0.9, 10.0, 4};
}

TEST_CASE("bandpass spec validation") {
  CHECK_THROWS_AS(signal::BandpassSpec({0.0, 0.9, 10.0, 4}).validate(), ValidationError);
  CHECK_THROWS_AS(signal::BandpassSpec({0.9, 0.1, 10.0, 4}).validate(), ValidationError);
  CHECK_THROWS_AS(signal::BandpassSpec({0.1, 6.0, 10.0, 4}).validate(), ValidationError);
  CHECK_THROWS_AS(signal::BandpassSpec({0.1, 0.9, 10.0, 3}).validate(), ValidationError);
  CHECK_THROWS_AS(signal::BandpassSpec({0.1, 0.9, 10.0, 0}).validate(), ValidationError);
  CHECK_NOTHROW(kCalBand.validate());
}

TEST_CASE("bandpass design matches the reference response") {
  // Gains computed independently with scipy.signal.butter/sosfreqz for a
  // 4th-order Butterworth bandpass [0.1, 0.9] Hz at fs=10; the filter applied
  // forward+backward squares them.
  const std::vector<signal::Biquad> sos = signal::design_butterworth_bandpass(kCalBand);
  REQUIRE(sos.size() == 2);
  CHECK(sos[0].a1 == doctest::Approx(-1.33241931).epsilon(1e-7));
  CHECK(sos[0].a2 == doctest::Approx(0.53484146).epsilon(1e-7));
  CHECK(sos[1].a1 == doctest::Approx(-1.91501994).epsilon(1e-7));
  CHECK(sos[1].a2 == doctest::Approx(0.91954770).epsilon(1e-7));
}

TEST_CASE("bandpass rejects DC") {
  const std::vector<double> x(1000, 42.0);
  const std::vector<double> y = signal::bandpass(x, kCalBand);
  CHECK(max_abs(y) < 1e-3 * 42.0);
}

TEST_CASE("bandpass passband and stopband gains") {
  const std::size_t n = 4000;
  // 0.5 Hz rides through the passband: expect the scipy filtfilt value 0.9777.
  std::vector<double> in_band =
      signal::bandpass(sine_wave(0.5, 10.0, n), kCalBand);
  const double pass_gain = mid_amplitude(in_band);
  CHECK(pass_gain > 0.95);
  CHECK(pass_gain <= 1.0);
  CHECK(pass_gain == doctest::Approx(0.977659).epsilon(1e-3));

  // 4 Hz is deep in the stopband: scipy filtfilt gives 5.0e-5.
  std::vector<double> stopped = signal::bandpass(sine_wave(4.0, 10.0, n), kCalBand);
  CHECK(mid_amplitude(stopped) < 0.05);
  CHECK(mid_amplitude(stopped) < 1e-4);
}

TEST_CASE("bandpass zero-phase alignment") {
  const std::size_t n = 2000;
  const std::vector<double> x = sine_wave(0.5, 10.0, n);
  const std::vector<double> y = signal::bandpass(x, kCalBand);

  // Fit the passband gain over the middle half; a phase shift would leave a
  // quadrature residual of about gain * 2*pi*f/fs per sample of misalignment.
  const std::size_t lo = n / 4, hi = 3 * n / 4;
  double num = 0.0, den = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    num += y[i] * x[i];
    den += x[i] * x[i];
  }
  const double gain = num / den;
  double resid = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double d = y[i] - gain * x[i];
    resid += d * d;
  }
  resid = std::sqrt(resid / static_cast<double>(hi - lo));
  CHECK(resid < 0.05);  // well under one sample of shift

  // The input peaks at i = 5 + 20k; the output must peak there too.
  const std::size_t peak = 1005;
  CHECK(y[peak] > y[peak - 2]);
  CHECK(y[peak] > y[peak + 2]);
}

TEST_CASE("bandpass is linear") {
  Rng rng(11);
  const std::vector<double> x = rng.uniform_vector(600, -5.0, 5.0);
  const std::vector<double> y = rng.uniform_vector(600, -5.0, 5.0);
  const double a = 2.25, b = -0.75;
  std::vector<double> combo(600);
  for (std::size_t i = 0; i < 600; ++i) combo[i] = a * x[i] + b * y[i];

  const std::vector<double> lhs = signal::bandpass(combo, kCalBand);
  const std::vector<double> fx = signal::bandpass(x, kCalBand);
  const std::vector<double> fy = signal::bandpass(y, kCalBand);
  double max_rel = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < 600; ++i) scale = std::max(scale, std::abs(lhs[i]));
  for (std::size_t i = 0; i < 600; ++i) {
    max_rel = std::max(max_rel, std::abs(lhs[i] - (a * fx[i] + b * fy[i])) / scale);
  }
  CHECK(max_rel < 1e-9);
}

TEST_CASE("bandpass is time-reversal symmetric") {
  Rng rng(12);
  const std::vector<double> x = rng.uniform_vector(800, -3.0, 3.0);
  std::vector<double> rev(x.rbegin(), x.rend());
  std::vector<double> f_rev = signal::bandpass(rev, kCalBand);
  std::reverse(f_rev.begin(), f_rev.end());
  const std::vector<double> f = signal::bandpass(x, kCalBand);
  double scale = 0.0;
  for (double v : f) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(std::abs(f[i] - f_rev[i]) < 1e-9 * scale);
  }
}

TEST_CASE("bandpass input validation") {
  std::vector<double> short_vec(12, 1.0);
  CHECK_THROWS_AS(signal::bandpass(short_vec, kCalBand), ValidationError);
  std::vector<double> with_nan(100, 1.0);
  with_nan[40] = std::nan("");
  CHECK_THROWS_AS(signal::bandpass(with_nan, kCalBand), ValidationError);
}

TEST_CASE("central_fdm on ramps and parabolas") {
  CHECK(signal::central_fdm(std::vector<double>{0, 1, 2, 3}) ==
        std::vector<double>{1, 1, 1, 1});
  CHECK(signal::central_fdm(std::vector<double>{7, 7, 7, 7, 7}) ==
        std::vector<double>{0, 0, 0, 0, 0});

  // Central differences are exact on quadratics at interior points.
  std::vector<double> sq(5);
  for (std::size_t i = 0; i < 5; ++i) sq[i] = static_cast<double>(i * i);
  const std::vector<double> g = signal::central_fdm(sq);
  CHECK(g[1] == 2.0);
  CHECK(g[2] == 4.0);
  CHECK(g[3] == 6.0);

  CHECK_THROWS_AS(signal::central_fdm(std::vector<double>{1, 2}), ValidationError);
  CHECK_THROWS_AS(signal::central_fdm(std::vector<double>{1, std::nan(""), 3}),
                  ValidationError);
}

TEST_CASE("central_fdm of affine sequences is exactly constant") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = rng.uniform(-10, 10), b = rng.uniform(-2, 2);
    std::vector<double> x(50);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = a + b * static_cast<double>(i);
    const std::vector<double> g = signal::central_fdm(x);
    for (double v : g) CHECK(v == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("detrend removes affine content") {
  const std::vector<double> exact = signal::detrend(std::vector<double>{1, 2, 3});
  for (double v : exact) CHECK(v == doctest::Approx(0.0).epsilon(1e-14));
  const std::vector<double> flat = signal::detrend(std::vector<double>{5, 5, 5, 5});
  for (double v : flat) CHECK(v == doctest::Approx(0.0).epsilon(1e-14));

  // Sinusoid on a trend: the residual has no mean and no index correlation.
  const std::size_t n = 1000;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = 3.0 + 0.5 * static_cast<double>(i) + std::sin(static_cast<double>(i));
  }
  const std::vector<double> r = signal::detrend(x);
  double mean = 0.0;
  for (double v : r) mean += v;
  mean /= static_cast<double>(n);
  CHECK(std::abs(mean) < 1e-9);

  // Regress the residual on the index: slope must vanish.
  const double mi = (static_cast<double>(n) - 1) / 2.0;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double di = static_cast<double>(i) - mi;
    sxx += di * di;
    sxy += di * r[i];
  }
  CHECK(std::abs(sxy / sxx) < 1e-9);
}

TEST_CASE("detrend is idempotent") {
  Rng rng(14);
  const std::vector<double> x = rng.uniform_vector(300, -20.0, 20.0);
  const std::vector<double> once = signal::detrend(x);
  const std::vector<double> twice = signal::detrend(once);
  double scale = 0.0;
  for (double v : once) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(std::abs(once[i] - twice[i]) <= 1e-12 * scale);
  }
}

TEST_CASE("detrend input validation") {
  CHECK_THROWS_AS(signal::detrend(std::vector<double>{1.0}), ValidationError);
  CHECK_THROWS_AS(signal::detrend(std::vector<double>{1.0, std::nan("")}),
                  ValidationError);
}
