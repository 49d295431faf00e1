#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace clocksync::svg {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y); y <= 0 is skipped on log axes
  std::string color = "#000000";
  std::string dash;  // SVG stroke-dasharray, empty for solid
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

namespace detail {

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Panels laid out left to right, linear x axis, log10 y axis.
inline std::string render_log_panels(const std::vector<Panel>& panels) {
  constexpr double kW = 420, kH = 320, kLeft = 70, kRight = 20, kTop = 36, kBottom = 48;
  const double total_w = kW * static_cast<double>(std::max<std::size_t>(panels.size(), 1));
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(total_w) + "\" height=\"" +
                    detail::num(kH + 60) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const Panel& panel = panels[p];
    const double ox = kW * static_cast<double>(p);
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : panel.series)
      for (auto [x, y] : s.points) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        if (y > 0 && std::isfinite(y)) {
          ymin = std::min(ymin, std::log10(y));
          ymax = std::max(ymax, std::log10(y));
        }
      }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (!std::isfinite(ymin)) ymin = 0, ymax = 1;
    ymin = std::floor(ymin);
    ymax = std::max(std::ceil(ymax), ymin + 1);

    const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
    auto px = [&](double x) { return ox + kLeft + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double ly) { return kTop + (ymax - ly) / (ymax - ymin) * ph; };

    svg += "<text x=\"" + detail::num(ox + kW / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" +
           detail::escape(panel.title) + "</text>\n";
    svg += "<rect x=\"" + detail::num(ox + kLeft) + "\" y=\"" + detail::num(kTop) + "\" width=\"" + detail::num(pw) +
           "\" height=\"" + detail::num(ph) + "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (double e = ymin; e <= ymax + 1e-9; e += 1) {
      svg += "<line x1=\"" + detail::num(ox + kLeft) + "\" x2=\"" + detail::num(ox + kLeft + pw) + "\" y1=\"" +
             detail::num(py(e)) + "\" y2=\"" + detail::num(py(e)) + "\" stroke=\"#ddd\"/>\n";
      svg += "<text x=\"" + detail::num(ox + kLeft - 6) + "\" y=\"" + detail::num(py(e) + 4) +
             "\" text-anchor=\"end\">1e" + std::to_string(static_cast<int>(e)) + "</text>\n";
    }
    std::vector<double> xticks;
    for (const auto& s : panel.series)
      for (auto [x, y] : s.points) xticks.push_back(x);
    std::sort(xticks.begin(), xticks.end());
    xticks.erase(std::unique(xticks.begin(), xticks.end()), xticks.end());
    for (double x : xticks)
      svg += "<text x=\"" + detail::num(px(x)) + "\" y=\"" + detail::num(kTop + ph + 16) +
             "\" text-anchor=\"middle\">" + detail::num(x).substr(0, detail::num(x).find('.')) + "</text>\n";
    svg += "<text x=\"" + detail::num(ox + kLeft + pw / 2) + "\" y=\"" + detail::num(kTop + ph + 34) +
           "\" text-anchor=\"middle\">" + detail::escape(panel.x_label) + "</text>\n";
    svg += "<text transform=\"translate(" + detail::num(ox + 14) + "," + detail::num(kTop + ph / 2) +
           ") rotate(-90)\" text-anchor=\"middle\">" + detail::escape(panel.y_label) + "</text>\n";

    double legend_y = kH + 4;
    for (const auto& s : panel.series) {
      std::string path;
      for (auto [x, y] : s.points) {
        if (!(y > 0) || !std::isfinite(y)) continue;
        path += (path.empty() ? "M" : " L") + detail::num(px(x)) + "," + detail::num(py(std::log10(y)));
      }
      const std::string dash = s.dash.empty() ? "" : " stroke-dasharray=\"" + s.dash + "\"";
      if (!path.empty())
        svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.6\"" + dash +
               "/>\n";
      svg += "<line x1=\"" + detail::num(ox + kLeft) + "\" x2=\"" + detail::num(ox + kLeft + 24) + "\" y1=\"" +
             detail::num(legend_y) + "\" y2=\"" + detail::num(legend_y) + "\" stroke=\"" + s.color +
             "\" stroke-width=\"1.6\"" + dash + "/>\n";
      svg += "<text x=\"" + detail::num(ox + kLeft + 30) + "\" y=\"" + detail::num(legend_y + 4) + "\">" +
             detail::escape(s.label) + "</text>\n";
      legend_y += 12;
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace clocksync::svg
