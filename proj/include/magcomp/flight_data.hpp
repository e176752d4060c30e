#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace magcomp::flight {

/// NaN census for one channel. `nan_indices` is capped at a report limit;
/// `nan_count` always reflects the full count.
struct ChannelReport {
  std::string name;
  std::size_t nan_count{0};
  std::vector<std::size_t> nan_indices;
  double min{0.0};  // over finite samples; NaN when none
  double max{0.0};
};

/**
 * @brief Immutable columnar time series of one flight (or flight segment).
 *
 * All channels share the same length N >= 2, TIME is strictly increasing,
 * and the sample rate is consistent with the median TIME step within 1%.
 * Channel lookups accept the field-catalog alias spellings (CUR_COMR /
 * CUR_COM1 and similar pairs).
 */
class FlightFrame {
 public:
  /// Builds a frame from parallel columns. fs_hint > 0 asserts the sample
  /// rate (within 1% of the TIME spacing); fs_hint == 0 derives it.
  static FlightFrame from_columns(std::vector<std::string> names,
                                  std::vector<std::vector<double>> columns,
                                  double fs_hint = 0.0);

  std::size_t size() const { return n_; }
  double sample_rate_hz() const { return sample_rate_hz_; }

  /// Line number of the frame when the LINE channel is constant, else 0.
  double line_id() const { return line_id_; }

  bool has(std::string_view name) const;
  std::span<const double> channel(std::string_view name) const;
  std::span<const double> time() const { return channel("TIME"); }
  const std::vector<std::string>& channel_names() const { return names_; }

 private:
  FlightFrame() = default;

  std::size_t index_of(std::string_view name) const;  // npos when absent

  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
  std::map<std::string, std::size_t, std::less<>> by_name_;
  std::size_t n_{0};
  double sample_rate_hz_{0.0};
  double line_id_{0.0};
};

/// Loads a comma-delimited flight file (header row of field names, one row
/// per sample, missing values spelled "NaN"). Channels named in `schema`
/// must be present; everything found is loaded regardless.
FlightFrame load_flight(const std::filesystem::path& path,
                        const std::vector<std::string>& schema = {},
                        double fs_hint = 0.0);

/// Writes the frame in the same comma-delimited format, bit-exact round trip.
void save_flight(const FlightFrame& frame, const std::filesystem::path& path);

/// One report per channel, in frame column order.
std::vector<ChannelReport> check_channels(const FlightFrame& frame);

/// Rows whose LINE value matches line_id on two fractional digits.
FlightFrame select_line(const FlightFrame& frame, double line_id);

/// Distinct LINE values in order of first appearance.
std::vector<double> distinct_lines(const FlightFrame& frame);

}  // namespace magcomp::flight
