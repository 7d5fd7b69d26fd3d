#pragma once

// Minimal line plots as standalone SVG: one or two ordinates, a legend, no
// external dependencies.

#include <string>
#include <vector>

namespace ifm::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool right_axis = false;
  std::string color = "#1f77b4";
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string left_label;
  std::string right_label;  // empty: no right ordinate
  std::vector<Series> series;
  int width = 720;
  int height = 450;
};

std::string render_svg(const PlotSpec& spec);

// Tick positions covering [lo, hi] with a 1/2/5 x 10^k spacing.
std::vector<double> nice_ticks(double lo, double hi, int target = 6);

}  // namespace ifm::plot
