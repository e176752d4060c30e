#include "magcomp/flight_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "magcomp/errors.hpp"
#include "magcomp/text_io.hpp"

namespace magcomp::flight {

namespace {

constexpr std::size_t kNanIndexCap = 16;

// Appendix-B fields whose spelling differs between the catalog and the
// training-field list; both are accepted.
constexpr std::pair<std::string_view, std::string_view> kAliases[] = {
    {"CUR_COM1", "CUR_COMR"},   {"CUR_ACHi", "CUR_ACHR"},
    {"CUR_SRVO_I", "CUR_SRVO_R"}, {"CUR_BAT1", "CUR_BATR"},
    {"V_BAT1", "V_BATR"},
};

std::string_view alias_of(std::string_view name) {
  for (const auto& [a, b] : kAliases) {
    if (name == a) return b;
    if (name == b) return a;
  }
  return {};
}

bool is_mag_channel(std::string_view name) {
  return name.find("MAG") != std::string_view::npos ||
         name.substr(0, 4) == "FLUX";
}

std::string format_line_id(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string strip(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

FlightFrame FlightFrame::from_columns(std::vector<std::string> names,
                                      std::vector<std::vector<double>> columns,
                                      double fs_hint) {
  if (names.size() != columns.size()) {
    throw ValidationError("flight frame: name/column count mismatch");
  }
  if (names.empty()) {
    throw ValidationError("flight frame: no channels");
  }
  const std::size_t n = columns.front().size();
  if (n < 2) {
    throw ValidationError("flight frame: need at least 2 samples");
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != n) {
      throw ValidationError("flight frame: channel " + names[c] +
                            " has ragged length");
    }
  }

  FlightFrame frame;
  frame.names_ = std::move(names);
  frame.columns_ = std::move(columns);
  frame.n_ = n;
  for (std::size_t c = 0; c < frame.names_.size(); ++c) {
    if (!frame.by_name_.emplace(frame.names_[c], c).second) {
      throw ValidationError("flight frame: duplicate channel " + frame.names_[c]);
    }
  }

  const std::size_t t = frame.index_of("TIME");
  if (t == std::string::npos) {
    throw ValidationError("flight frame: missing required TIME channel");
  }
  const std::vector<double>& time = frame.columns_[t];
  std::vector<double> dt;
  dt.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(time[i + 1] > time[i])) {
      throw ValidationError("flight frame: non-monotone time at sample " +
                            std::to_string(i + 1));
    }
    dt.push_back(time[i + 1] - time[i]);
  }
  std::nth_element(dt.begin(), dt.begin() + static_cast<std::ptrdiff_t>(dt.size() / 2),
                   dt.end());
  const double median_dt = dt[dt.size() / 2];
  const double derived_fs = 1.0 / median_dt;
  if (fs_hint > 0.0) {
    if (std::abs(derived_fs - fs_hint) > 0.01 * fs_hint) {
      throw ValidationError("flight frame: sample rate " +
                            io::format_double(fs_hint) +
                            " Hz inconsistent with TIME spacing (median implies " +
                            io::format_double(derived_fs) + " Hz)");
    }
    frame.sample_rate_hz_ = fs_hint;
  } else {
    frame.sample_rate_hz_ = derived_fs;
  }

  const std::size_t l = frame.index_of("LINE");
  if (l != std::string::npos) {
    const std::vector<double>& line = frame.columns_[l];
    const std::string first = format_line_id(line.front());
    bool constant = true;
    for (double v : line) {
      if (format_line_id(v) != first) {
        constant = false;
        break;
      }
    }
    if (constant) frame.line_id_ = line.front();
  }
  return frame;
}

std::size_t FlightFrame::index_of(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it != by_name_.end()) return it->second;
  const std::string_view other = alias_of(name);
  if (!other.empty()) {
    it = by_name_.find(other);
    if (it != by_name_.end()) return it->second;
  }
  return std::string::npos;
}

bool FlightFrame::has(std::string_view name) const {
  return index_of(name) != std::string::npos;
}

std::span<const double> FlightFrame::channel(std::string_view name) const {
  const std::size_t c = index_of(name);
  if (c == std::string::npos) {
    throw ValidationError("flight frame: no channel named " + std::string(name));
  }
  return columns_[c];
}

FlightFrame load_flight(const std::filesystem::path& path,
                        const std::vector<std::string>& schema,
                        double fs_hint) {
  const std::string text = io::read_text(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("flight file empty: " + path.string());
  }
  std::vector<std::string> names;
  for (std::string& field : split_csv(line)) {
    names.push_back(strip(field));
  }
  const std::size_t ncol = names.size();

  std::vector<std::vector<double>> columns(ncol);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (strip(line).empty()) continue;
    ++row;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != ncol) {
      throw ValidationError(path.string() + ": row " + std::to_string(row) +
                            " has " + std::to_string(fields.size()) +
                            " fields, header has " + std::to_string(ncol));
    }
    for (std::size_t c = 0; c < ncol; ++c) {
      columns[c].push_back(io::parse_double(
          fields[c], path.string() + ": row " + std::to_string(row) +
                         ", column " + names[c]));
    }
  }

  bool any_mag = false;
  for (const std::string& n : names) any_mag = any_mag || is_mag_channel(n);
  if (!any_mag) {
    throw ValidationError(path.string() + ": no magnetometer channel present");
  }

  FlightFrame frame = FlightFrame::from_columns(std::move(names),
                                                std::move(columns), fs_hint);
  for (const std::string& wanted : schema) {
    if (!frame.has(wanted)) {
      throw ValidationError(path.string() + ": missing required column " + wanted);
    }
  }
  return frame;
}

void save_flight(const FlightFrame& frame, const std::filesystem::path& path) {
  std::string out;
  const std::vector<std::string>& names = frame.channel_names();
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c) out += ',';
    out += names[c];
  }
  out += '\n';
  const std::size_t n = frame.size();
  std::vector<std::span<const double>> cols;
  cols.reserve(names.size());
  for (const std::string& name : names) cols.push_back(frame.channel(name));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out += ',';
      out += io::format_double(cols[c][i]);
    }
    out += '\n';
  }
  io::write_text_atomic(path, out);
}

std::vector<ChannelReport> check_channels(const FlightFrame& frame) {
  std::vector<ChannelReport> reports;
  reports.reserve(frame.channel_names().size());
  for (const std::string& name : frame.channel_names()) {
    ChannelReport r;
    r.name = name;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    const std::span<const double> col = frame.channel(name);
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (std::isnan(col[i])) {
        if (r.nan_indices.size() < kNanIndexCap) r.nan_indices.push_back(i);
        ++r.nan_count;
      } else {
        lo = std::min(lo, col[i]);
        hi = std::max(hi, col[i]);
      }
    }
    const bool any_finite = lo <= hi;
    r.min = any_finite ? lo : std::nan("");
    r.max = any_finite ? hi : std::nan("");
    reports.push_back(std::move(r));
  }
  return reports;
}

FlightFrame select_line(const FlightFrame& frame, double line_id) {
  const std::span<const double> line = frame.channel("LINE");
  const std::string wanted = format_line_id(line_id);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (format_line_id(line[i]) == wanted) rows.push_back(i);
  }
  if (rows.empty()) {
    throw ValidationError("select_line: no rows with LINE " + wanted);
  }
  std::vector<std::vector<double>> columns;
  columns.reserve(frame.channel_names().size());
  for (const std::string& name : frame.channel_names()) {
    const std::span<const double> col = frame.channel(name);
    std::vector<double> sub;
    sub.reserve(rows.size());
    for (std::size_t i : rows) sub.push_back(col[i]);
    columns.push_back(std::move(sub));
  }
  return FlightFrame::from_columns(frame.channel_names(), std::move(columns));
}

std::vector<double> distinct_lines(const FlightFrame& frame) {
  const std::span<const double> line = frame.channel("LINE");
  std::vector<double> out;
  std::vector<std::string> seen;
  for (double v : line) {
    const std::string id = format_line_id(v);
    if (std::find(seen.begin(), seen.end(), id) == seen.end()) {
      seen.push_back(id);
      out.push_back(v);
    }
  }
  return out;
}

}  // namespace magcomp::flight
