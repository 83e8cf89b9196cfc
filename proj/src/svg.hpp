#pragma once

#include <string>
#include <vector>

namespace ltrawl::detail {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;  // NaN points are skipped
};

// Minimal line plot; deterministic output.
std::string line_plot_svg(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<PlotSeries>& series);

}  // namespace ltrawl::detail
