#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace dgns {

/// One polyline on a chart.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Writes a self-contained SVG line chart with axes, tick labels and a
/// legend. With log_y, values are plotted as log10(max(y, floor)).
void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series, bool log_y = false);

}  // namespace dgns
