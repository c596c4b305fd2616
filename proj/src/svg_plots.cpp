#include "cibp/svg_plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace cibp {

namespace {

std::string fmt(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.2f", v);
  return buffer;
}

const char* series_color(const std::string& prior) {
  if (prior == "CIBP") return "#1f77b4";
  if (prior == "IBP") return "#d62728";
  return "#7f7f7f";
}

}  // namespace

std::string growth_plot_svg(const std::vector<AggregateRow>& rows, double reference) {
  const double width = 640.0;
  const double height = 420.0;
  const double left = 60.0;
  const double right = 20.0;
  const double top = 20.0;
  const double bottom = 50.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double x_min = 0.0;
  double x_max = 1.0;
  double y_max = std::max(1.0, reference);
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  if (!rows.empty()) {
    x_min = static_cast<double>(rows.front().p);
    x_max = x_min;
    for (const AggregateRow& r : rows) {
      x_min = std::min(x_min, static_cast<double>(r.p));
      x_max = std::max(x_max, static_cast<double>(r.p));
      y_max = std::max(y_max, r.mean_kplus);
      series[r.prior].emplace_back(static_cast<double>(r.p), r.mean_kplus);
    }
    if (x_max == x_min) x_max = x_min + 1.0;
  }
  y_max = std::ceil(y_max) + 1.0;

  const auto x_of = [&](double p) { return left + (p - x_min) / (x_max - x_min) * plot_w; };
  const auto y_of = [&](double k) { return top + plot_h - k / y_max * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) +
         "\" height=\"" + fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " +
         fmt(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  svg += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top) + "\" x2=\"" + fmt(left) +
         "\" y2=\"" + fmt(top + plot_h) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top + plot_h) + "\" x2=\"" +
         fmt(left + plot_w) + "\" y2=\"" + fmt(top + plot_h) + "\" stroke=\"black\"/>\n";

  // y ticks at integers
  for (double k = 0.0; k <= y_max + 0.5; k += 1.0) {
    const double y = y_of(k);
    svg += "<line x1=\"" + fmt(left - 4.0) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(left) +
           "\" y2=\"" + fmt(y) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt(left - 8.0) + "\" y=\"" + fmt(y + 4.0) +
           "\" font-size=\"12\" text-anchor=\"end\">" + fmt(k) + "</text>\n";
  }
  // x ticks at the observed dimensions
  std::vector<double> x_ticks;
  for (const AggregateRow& r : rows) x_ticks.push_back(static_cast<double>(r.p));
  std::sort(x_ticks.begin(), x_ticks.end());
  x_ticks.erase(std::unique(x_ticks.begin(), x_ticks.end()), x_ticks.end());
  for (const double p : x_ticks) {
    const double x = x_of(p);
    svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(top + plot_h) + "\" x2=\"" + fmt(x) +
           "\" y2=\"" + fmt(top + plot_h + 4.0) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(top + plot_h + 18.0) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + fmt(p) + "</text>\n";
  }
  svg += "<text x=\"" + fmt(left + plot_w / 2.0) + "\" y=\"" + fmt(height - 12.0) +
         "\" font-size=\"13\" text-anchor=\"middle\">dimension p</text>\n";
  svg += "<text x=\"14\" y=\"" + fmt(top + plot_h / 2.0) +
         "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
         fmt(top + plot_h / 2.0) + ")\">mean feature count</text>\n";

  // reference line
  svg += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(y_of(reference)) + "\" x2=\"" +
         fmt(left + plot_w) + "\" y2=\"" + fmt(y_of(reference)) +
         "\" stroke=\"red\" stroke-dasharray=\"6,4\"/>\n";

  double legend_y = top + 16.0;
  for (const auto& [prior, points] : series) {
    std::string path;
    for (const auto& [p, k] : points) {
      path += path.empty() ? "" : " ";
      path += fmt(x_of(p)) + "," + fmt(y_of(k));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(series_color(prior)) +
           "\" stroke-width=\"2\" points=\"" + path + "\"/>\n";
    for (const auto& [p, k] : points)
      svg += "<circle cx=\"" + fmt(x_of(p)) + "\" cy=\"" + fmt(y_of(k)) +
             "\" r=\"3\" fill=\"" + std::string(series_color(prior)) + "\"/>\n";
    svg += "<rect x=\"" + fmt(left + plot_w - 120.0) + "\" y=\"" + fmt(legend_y - 9.0) +
           "\" width=\"12\" height=\"12\" fill=\"" + std::string(series_color(prior)) +
           "\"/>\n";
    svg += "<text x=\"" + fmt(left + plot_w - 102.0) + "\" y=\"" + fmt(legend_y + 2.0) +
           "\" font-size=\"12\">" + prior + "</text>\n";
    legend_y += 18.0;
  }
  svg += "</svg>\n";
  return svg;
}

std::string heatmap_svg(const FeatureMatrix& matrix) {
  const double margin = 20.0;
  const std::size_t rows = matrix.rows();
  const std::size_t cols = matrix.cols();
  double cell = 16.0;
  if (rows > 0 && cols > 0)
    cell = std::clamp(600.0 / static_cast<double>(std::max(rows, cols)), 2.0, 16.0);
  const double grid_w = cell * static_cast<double>(std::max<std::size_t>(cols, 1));
  const double grid_h = cell * static_cast<double>(std::max<std::size_t>(rows, 1));
  const double width = grid_w + 2.0 * margin;
  const double height = grid_h + 2.0 * margin;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) +
         "\" height=\"" + fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " +
         fmt(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<rect x=\"" + fmt(margin) + "\" y=\"" + fmt(margin) + "\" width=\"" + fmt(grid_w) +
         "\" height=\"" + fmt(grid_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t k = 0; k < cols; ++k) {
      if (!matrix.get(j, k)) continue;
      svg += "<rect x=\"" + fmt(margin + cell * static_cast<double>(k)) + "\" y=\"" +
             fmt(margin + cell * static_cast<double>(j)) + "\" width=\"" + fmt(cell) +
             "\" height=\"" + fmt(cell) + "\" fill=\"black\"/>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace cibp
