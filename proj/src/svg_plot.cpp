#include "ghostfringe/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ghostfringe {

namespace {

constexpr double width = 720, height = 450;
constexpr double left = 80, right = 150, top = 40, bottom = 60;

std::string escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v, double step) {
  char buf[32];
  const int digits = std::max(0, static_cast<int>(-std::floor(std::log10(step) + 1e-9)));
  std::snprintf(buf, sizeof buf, "%.*f", digits, std::abs(v) < 1e-12 * step ? 0.0 : v);
  return buf;
}

// 1-2-5 tick step giving roughly `target` intervals.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag)
      return m * mag;
  return 10.0 * mag;
}

} // namespace

std::string render_svg(const PlotSpec &plot) {
  double xmin = HUGE_VAL, xmax = -HUGE_VAL, ymin = HUGE_VAL, ymax = -HUGE_VAL;
  for (const auto &s : plot.series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      const double x = s.x[i] * plot.x_scale, y = s.y[i];
      if (!std::isfinite(x) || !std::isfinite(y))
        continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!(xmin <= xmax)) {
    xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  }
  if (xmax - xmin <= 0)
    xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin <= 0)
    ymin -= 0.5, ymax += 0.5;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(plot.title) << "</text>\n";
  o << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw)
    << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  const double xs = nice_step(xmax - xmin, 8);
  for (double t = std::ceil(xmin / xs) * xs; t <= xmax + 1e-9 * xs; t += xs) {
    o << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(px(t))
      << "\" y2=\"" << num(top + ph + 5) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << num(px(t)) << "\" y=\"" << num(top + ph + 18)
      << "\" text-anchor=\"middle\">" << tick_label(t, xs) << "</text>\n";
  }
  const double ys = nice_step(ymax - ymin, 6);
  for (double t = std::ceil(ymin / ys) * ys; t <= ymax + 1e-9 * ys; t += ys) {
    o << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(left)
      << "\" y2=\"" << num(py(t)) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << num(left - 8) << "\" y=\"" << num(py(t) + 4)
      << "\" text-anchor=\"end\">" << tick_label(t, ys) << "</text>\n";
  }
  o << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(height - 15)
    << "\" text-anchor=\"middle\">" << escape(plot.x_label) << "</text>\n";
  o << "<text transform=\"translate(20 " << num(top + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(plot.y_label) << "</text>\n";

  o << "<g>\n";
  double legend_y = top + 10;
  for (const auto &s : plot.series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.style == PlotSeries::Style::line) {
      o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < n; ++i) {
        const double x = s.x[i] * plot.x_scale;
        if (std::isfinite(x) && std::isfinite(s.y[i]))
          o << num(px(x)) << ',' << num(py(s.y[i])) << ' ';
      }
      o << "\"/>\n";
      o << "<line x1=\"" << num(width - right + 10) << "\" y1=\"" << num(legend_y) << "\" x2=\""
        << num(width - right + 30) << "\" y2=\"" << num(legend_y) << "\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\"/>";
    } else {
      const std::size_t stride = std::max<std::size_t>(1, (n + plot.max_markers - 1) /
                                                              std::max<std::size_t>(1, plot.max_markers));
      for (std::size_t i = 0; i < n; i += stride) {
        const double x = s.x[i] * plot.x_scale;
        if (std::isfinite(x) && std::isfinite(s.y[i]))
          o << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(s.y[i]))
            << "\" r=\"2.5\" fill=\"none\" stroke=\"" << s.color << "\"/>";
      }
      o << '\n';
      o << "<circle cx=\"" << num(width - right + 20) << "\" cy=\"" << num(legend_y)
        << "\" r=\"3\" fill=\"none\" stroke=\"" << s.color << "\"/>";
    }
    o << "<text x=\"" << num(width - right + 36) << "\" y=\"" << num(legend_y + 4) << "\">"
      << escape(s.label) << "</text>\n";
    legend_y += 18;
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

} // namespace ghostfringe
