#pragma once

#include <string>
#include <vector>

namespace ghostfringe {

struct PlotSeries {
  enum class Style { markers, line };

  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  Style style = Style::line;
  std::string color = "#1f4e9c";
};

/// A single x-y panel. Non-finite points are skipped; marker series are
/// thinned to at most max_markers symbols.
struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  double x_scale = 1.0; ///< multiplies x before plotting (1e3 for mm)
  std::size_t max_markers = 600;
  std::vector<PlotSeries> series;
};

std::string render_svg(const PlotSpec &plot);

} // namespace ghostfringe
