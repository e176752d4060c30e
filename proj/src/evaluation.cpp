#include "magcomp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "magcomp/errors.hpp"
#include "magcomp/signal.hpp"
#include "magcomp/text_io.hpp"

namespace magcomp::eval {

namespace {

void require_finite(std::span<const double> x, const char* op) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw ValidationError(std::string(op) + ": input contains NaN or infinity");
    }
  }
}

std::vector<double> map_truth(const flight::FlightFrame& frame,
                              const map::MapInterpolant& anomaly,
                              double core_field_nt) {
  const std::span<const double> lat = frame.channel("LAT");
  const std::span<const double> lon = frame.channel("LONG");
  std::vector<double> truth(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    truth[i] = core_field_nt + anomaly.at(lon[i], lat[i]);
  }
  return truth;
}

}  // namespace

double rmse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("rmse: length mismatch");
  if (a.empty()) throw ValidationError("rmse: empty input");
  require_finite(a, "rmse");
  require_finite(b, "rmse");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(a.size()));
}

double rmse_detrended(std::span<const double> candidate,
                      std::span<const double> truth) {
  if (candidate.size() != truth.size()) {
    throw ValidationError("rmse_detrended: length mismatch");
  }
  if (candidate.size() < 2) {
    throw ValidationError("rmse_detrended: need at least 2 samples");
  }
  std::vector<double> residual(candidate.size());
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    residual[i] = candidate[i] - truth[i];
  }
  const std::vector<double> flat = signal::detrend(residual);
  double acc = 0.0;
  for (double v : flat) acc += v * v;
  return std::sqrt(acc / static_cast<double>(flat.size()));
}

std::vector<EvalReport> evaluate_flight(
    const flight::FlightFrame& frame,
    const std::map<std::string, std::optional<tl::TLCoefficients>>& coeffs_by_channel,
    const EvalOptions& options) {
  std::vector<double> truth;
  if (options.truth_source == TruthSource::stinger) {
    if (!frame.has("IGRFMAG1")) {
      throw ValidationError(
          "evaluate: stinger truth needs the IGRFMAG1 channel");
    }
    const std::span<const double> t = frame.channel("IGRFMAG1");
    truth.assign(t.begin(), t.end());
  } else {
    if (options.anomaly == nullptr) {
      throw ValidationError("evaluate: map truth needs an anomaly map");
    }
    if (!frame.has("LAT") || !frame.has("LONG")) {
      throw ValidationError("evaluate: map truth needs LAT and LONG channels");
    }
    truth = map_truth(frame, *options.anomaly, options.core_field_nt);
  }

  const std::string fx = options.flux_prefix + "_X";
  const std::string fy = options.flux_prefix + "_Y";
  const std::string fz = options.flux_prefix + "_Z";

  std::vector<EvalReport> reports;
  for (const auto& [channel, coeffs] : coeffs_by_channel) {
    if (!frame.has(channel)) {
      throw ValidationError("evaluate: no channel named " + channel);
    }
    const std::span<const double> raw = frame.channel(channel);
    std::vector<double> candidate;
    if (coeffs.has_value()) {
      candidate = tl::compensate(*coeffs, raw, frame.channel(fx),
                                 frame.channel(fy), frame.channel(fz));
    } else {
      candidate.assign(raw.begin(), raw.end());
    }

    EvalReport r;
    r.channel = channel;
    r.truth_source = options.truth_source;
    r.n_samples = frame.size();
    r.rmse_nt = rmse(candidate, truth);
    if (options.per_series_detrend) {
      r.rmse_detrended_nt =
          rmse(signal::detrend(candidate), signal::detrend(truth));
    } else {
      r.rmse_detrended_nt = rmse_detrended(candidate, truth);
    }
    reports.push_back(std::move(r));
  }
  std::sort(reports.begin(), reports.end(),
            [](const EvalReport& a, const EvalReport& b) {
              return a.channel < b.channel;
            });
  return reports;
}

void write_report_csv(const std::vector<EvalReport>& reports,
                      const std::filesystem::path& path) {
  std::string out = "channel,truth_source,n,rmse_nT,rmse_detrended_nT\n";
  for (const EvalReport& r : reports) {
    out += r.channel;
    out += r.truth_source == TruthSource::stinger ? ",stinger," : ",map,";
    out += std::to_string(r.n_samples);
    out += ',' + io::format_double(r.rmse_nt);
    out += ',' + io::format_double(r.rmse_detrended_nt);
    out += '\n';
  }
  io::write_text_atomic(path, out);
}

void write_plot_svg(const flight::FlightFrame& frame,
                    const std::vector<double>& truth,
                    const std::map<std::string, std::vector<double>>& traces,
                    const std::filesystem::path& path) {
  const double width = 960.0, height = 480.0, margin = 50.0;
  const std::size_t n = frame.size();
  if (truth.size() != n) {
    throw ValidationError("plot: truth length does not match frame");
  }

  // All traces are detrended so offsets do not dwarf the signal.
  std::vector<std::pair<std::string, std::vector<double>>> lines;
  lines.emplace_back("truth", signal::detrend(truth));
  for (const auto& [name, trace] : traces) {
    if (trace.size() != n) {
      throw ValidationError("plot: trace " + name + " length mismatch");
    }
    lines.emplace_back(name, signal::detrend(trace));
  }

  double lo = 0.0, hi = 0.0;
  for (const auto& [name, ys] : lines) {
    for (double v : ys) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi <= lo) hi = lo + 1.0;

  const std::span<const double> time = frame.time();
  const double t0 = time.front(), t1 = time.back();
  auto sx = [&](double t) {
    return margin + (t - t0) / (t1 - t0) * (width - 2.0 * margin);
  };
  auto sy = [&](double v) {
    return height - margin - (v - lo) / (hi - lo) * (height - 2.0 * margin);
  };

  static constexpr const char* kColors[] = {"#000000", "#c0392b", "#2980b9",
                                            "#27ae60", "#8e44ad", "#d35400"};
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "' viewBox='0 0 " << width << " " << height
      << "'>\n";
  svg << "<rect x='" << margin << "' y='" << margin << "' width='"
      << width - 2 * margin << "' height='" << height - 2 * margin
      << "' fill='none' stroke='#888'/>\n";
  std::size_t color = 0;
  double legend_y = margin + 14.0;
  for (const auto& [name, ys] : lines) {
    const char* c = kColors[color % std::size(kColors)];
    svg << "<polyline fill='none' stroke='" << c << "' stroke-width='1' points='";
    const std::size_t stride = std::max<std::size_t>(1, n / 2000);
    for (std::size_t i = 0; i < n; i += stride) {
      svg << sx(time[i]) << ',' << sy(ys[i]) << ' ';
    }
    svg << "'/>\n";
    svg << "<text x='" << width - margin - 170 << "' y='" << legend_y
        << "' fill='" << c << "' font-size='12' font-family='sans-serif'>" << name
        << "</text>\n";
    legend_y += 16.0;
    ++color;
  }
  svg << "<text x='" << margin << "' y='" << height - 12
      << "' font-size='12' font-family='sans-serif'>time (s)</text>\n";
  svg << "<text x='8' y='" << margin - 8
      << "' font-size='12' font-family='sans-serif'>detrended anomaly (nT)</text>\n";
  svg << "</svg>\n";
  io::write_text_atomic(path, svg.str());
}

}  // namespace magcomp::eval
