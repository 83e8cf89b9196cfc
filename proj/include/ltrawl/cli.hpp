#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ltrawl/io.hpp"
#include "ltrawl/model.hpp"

namespace ltrawl {

struct RunConfig {
  std::string command;  // simulate | fit | acf | taildep | extremal-index
  std::string input;
  ColumnSpec columns;
  ThresholdSpec threshold;  // default: 95th percentile
  Variant variant = Variant::Original;
  int delta = 4;
  int run_length = 3;
  std::optional<std::uint64_t> seed;
  std::size_t length = 1000000;
  double step = 1.0;
  // Natural parameters: (alpha, beta, rho, kappa) or (xi, sigma, rho, kappa).
  std::optional<std::array<double, 4>> params;
  // Fit the input when a model is needed and no params are given.
  bool fit_model = false;
  int max_lag = 20;
  std::vector<int> lags{1, 2, 5};
  std::vector<double> levels{0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.999, 0.9999};
  std::vector<double> percentiles{0.9, 0.91, 0.92, 0.93, 0.94, 0.95, 0.96, 0.97, 0.98, 0.99, 0.995};
  std::string out;   // empty or "-" writes to stdout
  std::string plot;  // optional SVG path

  void validate() const;
};

// Applies the keys present in a JSON object on top of `base`.
RunConfig merge_config_json(RunConfig base, const std::string& json_text);
// The full resolved configuration as compact JSON.
std::string config_to_json(const RunConfig& config);

// Runs one subcommand. Returns 0 on success; on failure writes an error JSON
// object to `err` and returns 1.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace ltrawl
