#include "ifm/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace ifm::plot {

namespace {

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  Range padded() const {
    if (!(lo <= hi)) return {0.0, 1.0};
    if (hi - lo < 1e-12) return {lo - 0.5, hi + 0.5};
    return {lo, hi};
  }
};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v) { return fmt::format("{:g}", std::abs(v) < 1e-12 ? 0.0 : v); }

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / std::max(1, target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step - 1e-9) * step; t <= hi + 1e-9 * step; t += step) ticks.push_back(t);
  return ticks;
}

std::string render_svg(const PlotSpec& spec) {
  const double ml = 70, mr = spec.right_label.empty() ? 30 : 70, mt = 40, mb = 55;
  const double pw = spec.width - ml - mr;
  const double ph = spec.height - mt - mb;

  Range xr, yl, yr;
  for (const auto& s : spec.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) (s.right_axis ? yr : yl).add(v);
  }
  xr = xr.padded();
  yl = yl.padded();
  yr = yr.padded();
  const auto xticks = nice_ticks(xr.lo, xr.hi);
  const auto lticks = nice_ticks(yl.lo, yl.hi);
  const auto rticks = nice_ticks(yr.lo, yr.hi);
  // Extend ordinate ranges to whole ticks so gridlines reach the frame.
  auto widen = [](Range r, const std::vector<double>& t) {
    if (t.size() >= 2) {
      const double step = t[1] - t[0];
      r.lo = std::min(r.lo, t.front());
      r.hi = std::max(r.hi, t.back() < r.hi ? t.back() + step : t.back());
    }
    return r;
  };
  yl = widen(yl, lticks);
  yr = widen(yr, rticks);

  auto px = [&](double x) { return ml + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y, const Range& r) { return mt + ph - (y - r.lo) / (r.hi - r.lo) * ph; };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      spec.width, spec.height, spec.width, spec.height);
  svg += fmt::format("<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     ml + pw / 2, escape(spec.title));

  for (double t : xticks) {
    const double x = px(t);
    svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#e5e5e5\"/>\n", x,
                       mt, mt + ph);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", x, mt + ph + 16,
                       tick_label(t));
  }
  for (double t : lticks) {
    if (t > yl.hi + 1e-12) continue;
    const double y = py(t, yl);
    svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"#e5e5e5\"/>\n", ml,
                       y, ml + pw);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", ml - 6, y + 4,
                       tick_label(t));
  }
  if (!spec.right_label.empty()) {
    for (double t : rticks) {
      if (t > yr.hi + 1e-12) continue;
      svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", ml + pw + 6, py(t, yr) + 4, tick_label(t));
    }
    svg += fmt::format(
        "<text transform=\"translate({:.2f},{:.2f}) rotate(90)\" text-anchor=\"middle\">{}</text>\n",
        spec.width - 18.0, mt + ph / 2, escape(spec.right_label));
  }
  svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", ml, mt,
                     pw, ph);
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", ml + pw / 2,
                     spec.height - 14.0, escape(spec.x_label));
  svg += fmt::format("<text transform=\"translate(18,{:.2f}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n",
                     mt + ph / 2, escape(spec.left_label));

  for (const auto& s : spec.series) {
    const Range& r = s.right_axis ? yr : yl;
    std::string pts;
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.y[i], r));
    }
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", s.color, pts);
  }

  double ly = mt + 14;
  for (const auto& s : spec.series) {
    svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"{3}\" "
                       "stroke-width=\"2\"/>\n",
                       ml + 10, ly - 4, ml + 30, s.color);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}{}</text>\n", ml + 36, ly, escape(s.label),
                       s.right_axis && !spec.right_label.empty() ? " (right)" : "");
    ly += 16;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace ifm::plot
