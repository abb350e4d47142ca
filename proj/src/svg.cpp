#include "dgns/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dgns {
namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;
constexpr double kLogFloor = 1e-300;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                         "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string format_tick(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

}  // namespace

void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series, bool log_y) {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  auto transform_y = [log_y](double v) {
    return log_y ? std::log10(std::max(v, kLogFloor)) : v;
  };
  for (const PlotSeries& s : series) {
    if (s.x.size() != s.y.size()) {
      throw std::invalid_argument("write_line_chart: series x/y size mismatch");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i])) continue;
      const double ty = transform_y(s.y[i]);
      if (!std::isfinite(ty)) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, ty);
      ymax = std::max(ymax, ty);
    }
  }
  if (!(xmin <= xmax) || !(ymin <= ymax)) {
    xmin = 0.0;
    xmax = 1.0;
    ymin = 0.0;
    ymax = 1.0;
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto px = [&](double x) { return kMarginLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) { return kMarginTop + (ymax - y) / (ymax - ymin) * plot_h; };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open plot for writing: " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";

  // Axes with five ticks per direction.
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\""
      << kMarginLeft + plot_w << "\" y2=\"" << kMarginTop + plot_h
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
      << "\" y2=\"" << kMarginTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 5.0;
    const double fy = ymin + (ymax - ymin) * i / 5.0;
    out << "<line x1=\"" << px(fx) << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\"" << px(fx)
        << "\" y2=\"" << kMarginTop + plot_h + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(fx) << "\" y=\"" << kMarginTop + plot_h + 20
        << "\" text-anchor=\"middle\" font-size=\"11\">" << format_tick(fx) << "</text>\n";
    out << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << py(fy) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << py(fy) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << format_tick(fy) << "</text>\n";
  }
  out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << kMarginTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << kMarginTop + plot_h / 2 << ")\">" << y_label << (log_y ? " (log10)" : "")
      << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const PlotSeries& s = series[si];
    const char* color = kColors[si % (sizeof(kColors) / sizeof(kColors[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double ty = transform_y(s.y[i]);
      if (!std::isfinite(s.x[i]) || !std::isfinite(ty)) continue;
      out << px(s.x[i]) << "," << py(ty) << " ";
    }
    out << "\"/>\n";
    out << "<rect x=\"" << kMarginLeft + plot_w - 150 << "\" y=\"" << kMarginTop + 18 * si
        << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << kMarginLeft + plot_w - 132 << "\" y=\"" << kMarginTop + 18 * si + 10
        << "\" font-size=\"12\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failed for plot: " + path.string());
}

}  // namespace dgns
