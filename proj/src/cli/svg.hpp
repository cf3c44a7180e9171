#ifndef URYSOHN_CLI_SVG_HPP
#define URYSOHN_CLI_SVG_HPP

#include <string>
#include <utility>
#include <vector>

namespace urysohn::cli {

struct Series {
  std::string label;
  std::string colour;
  std::vector<std::pair<double, double>> points; // (x, y); nonpositive values are skipped
  bool dashed = false;
};

/// Standalone SVG line chart with logarithmic axes and decade grid lines.
std::string loglog_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series);

} // namespace urysohn::cli

#endif // URYSOHN_CLI_SVG_HPP
