#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ltrawl/model.hpp"

namespace ltrawl {

struct ColumnSpec {
  std::string time = "time";
  std::string value = "value";
};

// Raw observations Y_j. Missing values are NaN and stay in place.
struct RawSeries {
  std::vector<double> timestamps;
  std::vector<double> values;
  std::string source;
  std::string time_format;  // "numeric" or "iso-date" (days since 1970-01-01)
  std::size_t missing = 0;

  std::size_t size() const noexcept { return values.size(); }
};

// Header row required. Lines starting with '#' and blank lines are skipped.
// Empty fields and "NA" are missing values. Timestamps are plain numbers or
// ISO dates (YYYY-MM-DD, optionally followed by THH:MM[:SS]).
RawSeries ingest_csv(const std::string& path, const ColumnSpec& columns = {});
RawSeries parse_csv(std::string_view text, const ColumnSpec& columns = {},
                    const std::string& source = "<memory>");

// Linear interpolation between order statistics: position p (n - 1) in the
// sorted sample.
double quantile_linear(std::vector<double> sample, double p);
inline constexpr const char* kQuantileConvention =
    "linear interpolation between order statistics, position p*(n-1)";

struct ThresholdSpec {
  enum class Kind { Absolute, Percentile };
  Kind kind = Kind::Percentile;
  double value = 0.95;

  static ThresholdSpec absolute(double u) { return {Kind::Absolute, u}; }
  static ThresholdSpec percentile(double p) { return {Kind::Percentile, p}; }
  void validate() const;
};

struct ThresholdInfo {
  double threshold = 0.0;
  std::optional<double> percentile;
  std::string convention;
  std::size_t exceedances = 0;      // l
  std::size_t non_exceedances = 0;  // m
  std::size_t missing = 0;
  std::vector<std::string> warnings;
};

struct ExceedanceData {
  ExceedanceSeries series;
  ThresholdInfo info;
};

// X_j = max(Y_j - u, 0) over the non-missing rows. Positions keep the row
// index so gaps widen the index separation of the pairs that span them.
ExceedanceData to_exceedances(const RawSeries& raw, const ThresholdSpec& threshold);

// Locale-independent shortest-exact formatting with 17 significant digits;
// NaN is written as NA.
std::string format_double(double v);

}  // namespace ltrawl
