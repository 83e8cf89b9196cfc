#include "ltrawl/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "ltrawl/error.hpp"

namespace ltrawl {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(std::string_view line, std::size_t line_number) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) throw Error("line " + std::to_string(line_number) + ": unterminated quoted field");
  out.emplace_back(trim(field));
  return out;
}

bool parse_number(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_int(std::string_view s, int& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

// Days since 1970-01-01 for YYYY-MM-DD[THH:MM[:SS]] (space also accepted).
bool parse_iso_date(std::string_view s, double& out) {
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return false;
  int y = 0, m = 0, d = 0;
  if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), m) || !parse_int(s.substr(8, 2), d)) {
    return false;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return false;
  double seconds = 0.0;
  if (s.size() > 10) {
    if (s[10] != 'T' && s[10] != ' ') return false;
    const auto rest = s.substr(11);
    int hh = 0, mm = 0, ss = 0;
    if (rest.size() != 5 && rest.size() != 8) return false;
    if (!parse_int(rest.substr(0, 2), hh) || rest[2] != ':' || !parse_int(rest.substr(3, 2), mm)) return false;
    if (rest.size() == 8 && (rest[5] != ':' || !parse_int(rest.substr(6, 2), ss))) return false;
    if (hh > 23 || mm > 59 || ss > 59) return false;
    seconds = hh * 3600.0 + mm * 60.0 + ss;
  }
  out = static_cast<double>(std::chrono::sys_days{ymd}.time_since_epoch().count()) + seconds / 86400.0;
  return true;
}

bool is_missing(std::string_view s) { return s.empty() || s == "NA"; }

std::size_t column_index(const std::vector<std::string>& header, const std::string& name,
                         std::size_t line_number) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw Error("line " + std::to_string(line_number) + ": column '" + name + "' not found in header");
  }
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

RawSeries parse_csv(std::string_view text, const ColumnSpec& columns, const std::string& source) {
  RawSeries raw;
  raw.source = source;
  std::optional<std::size_t> time_col;
  std::size_t value_col = 0;
  std::size_t width = 0;
  std::size_t line_number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_number;
    const auto content = trim(line);
    if (content.empty() || content.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    const auto fields = split_fields(line, line_number);
    if (!time_col) {
      time_col = column_index(fields, columns.time, line_number);
      value_col = column_index(fields, columns.value, line_number);
      width = fields.size();
      if (end == text.size()) break;
      continue;
    }
    const auto where = "line " + std::to_string(line_number) + ": ";
    if (fields.size() != width) {
      throw Error(where + "expected " + std::to_string(width) + " fields, found " +
                  std::to_string(fields.size()));
    }
    const auto& ts = fields[*time_col];
    double t = 0.0;
    if (is_missing(ts)) throw Error(where + "missing timestamp");
    const bool numeric = parse_number(ts, t);
    if (!numeric && !parse_iso_date(ts, t)) throw Error(where + "malformed timestamp '" + ts + "'");
    const std::string format = numeric ? "numeric" : "iso-date";
    if (raw.time_format.empty()) {
      raw.time_format = format;
    } else if (raw.time_format != format) {
      throw Error(where + "timestamp format differs from earlier rows");
    }
    if (!raw.timestamps.empty()) {
      if (t == raw.timestamps.back()) throw Error(where + "duplicate timestamp '" + ts + "'");
      if (t < raw.timestamps.back()) throw Error(where + "timestamps not increasing at '" + ts + "'");
    }
    const auto& vs = fields[value_col];
    double v = std::numeric_limits<double>::quiet_NaN();
    if (is_missing(vs)) {
      ++raw.missing;
    } else if (!parse_number(vs, v)) {
      throw Error(where + "malformed value '" + vs + "'");
    }
    raw.timestamps.push_back(t);
    raw.values.push_back(v);
    if (end == text.size()) break;
  }
  if (!time_col) throw Error(source + ": no header row");
  if (raw.values.empty()) throw Error(source + ": no data rows");
  if (raw.missing == raw.values.size()) throw Error(source + ": every value is missing");
  return raw;
}

RawSeries ingest_csv(const std::string& path, const ColumnSpec& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open input file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), columns, path);
}

double quantile_linear(std::vector<double> sample, double p) {
  if (sample.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
  std::sort(sample.begin(), sample.end());
  const double pos = p * static_cast<double>(sample.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sample.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sample[lo] + frac * (sample[hi] - sample[lo]);
}

void ThresholdSpec::validate() const {
  if (kind == Kind::Percentile) {
    if (!(value > 0.0 && value < 1.0)) throw std::invalid_argument("percentile must lie in (0, 1)");
  } else if (!std::isfinite(value)) {
    throw std::invalid_argument("threshold must be finite");
  }
}

ExceedanceData to_exceedances(const RawSeries& raw, const ThresholdSpec& threshold) {
  threshold.validate();
  std::vector<double> times;
  std::vector<double> observed;
  std::vector<std::int64_t> positions;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (std::isnan(raw.values[i])) continue;
    times.push_back(raw.timestamps[i]);
    observed.push_back(raw.values[i]);
    positions.push_back(static_cast<std::int64_t>(i));
  }
  if (observed.empty()) throw Error("no non-missing values to threshold");

  ThresholdInfo info;
  if (threshold.kind == ThresholdSpec::Kind::Percentile) {
    info.percentile = threshold.value;
    info.convention = kQuantileConvention;
    info.threshold = quantile_linear(observed, threshold.value);
  } else {
    info.convention = "absolute";
    info.threshold = threshold.value;
  }
  ExceedanceData out{ExceedanceSeries::from_raw(std::move(times), observed, info.threshold,
                                                std::move(positions)),
                     {}};
  info.exceedances = out.series.exceedances();
  info.non_exceedances = out.series.non_exceedances();
  info.missing = raw.size() - observed.size();
  if (info.exceedances == 0) info.warnings.push_back("no value exceeds the threshold");
  out.info = std::move(info);
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return {buf, ptr};
}

}  // namespace ltrawl
