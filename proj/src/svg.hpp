#pragma once

// Plain line charts as standalone SVG text, one stacked panel per metric.

#include <string>
#include <vector>

namespace vaxsite::detail {

struct ChartPanel {
  std::string label;
  std::vector<double> y;
};

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::vector<double>& x, const std::vector<ChartPanel>& panels);

}  // namespace vaxsite::detail
