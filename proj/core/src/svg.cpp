#include "fiberamp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace fiberamp {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt_coord(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Round a raw step to 1/2/5 times a power of ten.
double nice_step(double range, int target_ticks) {
  if (!(range > 0)) return 1.0;
  const double raw = range / std::max(1, target_ticks);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  double step = 10.0;
  if (frac <= 1.0)
    step = 1.0;
  else if (frac <= 2.0)
    step = 2.0;
  else if (frac <= 5.0)
    step = 5.0;
  return step * mag;
}

std::vector<double> linear_ticks(double lo, double hi, int target) {
  const double step = nice_step(hi - lo, target);
  std::vector<double> ticks;
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + 1e-12 * (hi - lo); t += step) ticks.push_back(t);
  return ticks;
}

void text(std::ostringstream& out, double x, double y,
          const std::string& s, const char* anchor, int size,
          const char* extra = "") {
  out << "<text x=\"" << fmt_coord(x) << "\" y=\"" << fmt_coord(y)
      << "\" font-family=\"sans-serif\" font-size=\"" << size
      << "\" text-anchor=\"" << anchor << "\"" << extra << ">" << s
      << "</text>\n";
}

// Perceptually ordered dark-blue -> yellow ramp (fixed anchors).
void colormap(double t, int& r, int& g, int& b) {
  static const int anchors[][3] = {{68, 1, 84},   {59, 82, 139},
                                   {33, 145, 140}, {94, 201, 98},
                                   {253, 231, 37}};
  if (!std::isfinite(t)) t = 0.0;
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double f = t - i;
  r = static_cast<int>(anchors[i][0] + f * (anchors[i + 1][0] - anchors[i][0]));
  g = static_cast<int>(anchors[i][1] + f * (anchors[i + 1][1] - anchors[i][1]));
  b = static_cast<int>(anchors[i][2] + f * (anchors[i + 1][2] - anchors[i][2]));
}

}  // namespace

std::string svg_line_plot(const std::vector<PlotSeries>& series,
                          const PlotStyle& style) {
  const double ml = 80, mr = 20, mt = style.title.empty() ? 20 : 44, mb = 58;
  const double pw = style.width - ml - mr;
  const double ph = style.height - mt - mb;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (double v : s.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (double v : s.y) {
      if (style.log_y && !(v > 0)) continue;
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (!(xmax > xmin)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymax > ymin)) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  if (style.log_y) {
    ymin = std::log10(ymin);
    ymax = std::log10(ymax);
  }
  const double ypad = 0.04 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double v) {
    if (style.log_y) v = std::log10(v);
    return mt + ph - (v - ymin) / (ymax - ymin) * ph;
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width
      << "\" height=\"" << style.height << "\" viewBox=\"0 0 " << style.width
      << " " << style.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<rect x=\"" << fmt_coord(ml) << "\" y=\"" << fmt_coord(mt)
      << "\" width=\"" << fmt_coord(pw) << "\" height=\"" << fmt_coord(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (!style.title.empty())
    text(out, ml + pw / 2, 26, style.title, "middle", 16);

  for (double t : linear_ticks(xmin, xmax, 8)) {
    const double x = px(t);
    out << "<line x1=\"" << fmt_coord(x) << "\" y1=\"" << fmt_coord(mt + ph)
        << "\" x2=\"" << fmt_coord(x) << "\" y2=\"" << fmt_coord(mt + ph + 5)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fmt_coord(x) << "\" y1=\"" << fmt_coord(mt)
        << "\" x2=\"" << fmt_coord(x) << "\" y2=\"" << fmt_coord(mt + ph)
        << "\" stroke=\"#dddddd\"/>\n";
    text(out, x, mt + ph + 20, fmt(t), "middle", 12);
  }
  const auto yticks = style.log_y
                          ? [&] {
                              std::vector<double> t;
                              for (int e = static_cast<int>(std::floor(ymin));
                                   e <= static_cast<int>(std::ceil(ymax)); ++e)
                                t.push_back(std::pow(10.0, e));
                              return t;
                            }()
                          : linear_ticks(ymin, ymax, 7);
  for (double t : yticks) {
    const double y = py(t);
    if (y < mt - 1 || y > mt + ph + 1) continue;
    out << "<line x1=\"" << fmt_coord(ml - 5) << "\" y1=\"" << fmt_coord(y)
        << "\" x2=\"" << fmt_coord(ml) << "\" y2=\"" << fmt_coord(y)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fmt_coord(ml) << "\" y1=\"" << fmt_coord(y)
        << "\" x2=\"" << fmt_coord(ml + pw) << "\" y2=\"" << fmt_coord(y)
        << "\" stroke=\"#dddddd\"/>\n";
    text(out, ml - 8, y + 4, fmt(t), "end", 12);
  }
  if (!style.x_label.empty())
    text(out, ml + pw / 2, style.height - 14, style.x_label, "middle", 14);
  if (!style.y_label.empty()) {
    char extra[128];
    std::snprintf(extra, sizeof extra, " transform=\"rotate(-90 %.2f %.2f)\"",
                  20.0, mt + ph / 2);
    text(out, 20, mt + ph / 2, style.y_label, "middle", 14, extra);
  }

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const std::string color =
        s.color.empty() ? kPalette[si % 8] : s.color;
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"";
    if (!s.dash.empty()) out << " stroke-dasharray=\"" << s.dash << "\"";
    out << " points=\"";
    const std::size_t n = std::min(s.x.size(), s.y.size());
    // Cap emitted points; plots do not need more than ~2k vertices.
    const std::size_t stride = std::max<std::size_t>(1, n / 2000);
    for (std::size_t i = 0; i < n; i += stride) {
      if (style.log_y && !(s.y[i] > 0)) continue;
      out << fmt_coord(px(s.x[i])) << "," << fmt_coord(py(s.y[i])) << " ";
    }
    if (n > 0 && (n - 1) % stride != 0 && !(style.log_y && !(s.y[n - 1] > 0)))
      out << fmt_coord(px(s.x[n - 1])) << "," << fmt_coord(py(s.y[n - 1]));
    out << "\"/>\n";
  }

  double ly = mt + 14;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const std::string color = s.color.empty() ? kPalette[si % 8] : s.color;
    out << "<line x1=\"" << fmt_coord(ml + 10) << "\" y1=\"" << fmt_coord(ly)
        << "\" x2=\"" << fmt_coord(ml + 34) << "\" y2=\"" << fmt_coord(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"";
    if (!s.dash.empty()) out << " stroke-dasharray=\"" << s.dash << "\"";
    out << "/>\n";
    text(out, ml + 40, ly + 4, s.label, "start", 12);
    ly += 16;
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_grid_heatmap(const std::vector<double>& xs,
                             const std::vector<double>& ys,
                             const std::vector<double>& values,
                             const HeatmapStyle& style) {
  const double ml = 86, mr = 96, mt = style.title.empty() ? 20 : 44, mb = 58;
  const double pw = style.width - ml - mr;
  const double ph = style.height - mt - mb;
  const std::size_t nx = xs.size(), ny = ys.size();

  double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    if (style.log_color && !(v > 0)) continue;
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  if (!(vmax > vmin)) {
    if (std::isfinite(vmin) && vmin > 0) {
      vmax = vmin * 10.0;
      vmin = vmin / 10.0;
    } else {
      vmin = style.log_color ? 1e-12 : 0.0;
      vmax = 1.0;
    }
  }
  auto unit = [&](double v) {
    if (style.log_color)
      return (std::log10(v) - std::log10(vmin)) /
             (std::log10(vmax) - std::log10(vmin));
    return (v - vmin) / (vmax - vmin);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width
      << "\" height=\"" << style.height << "\" viewBox=\"0 0 " << style.width
      << " " << style.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!style.title.empty())
    text(out, ml + pw / 2, 26, style.title, "middle", 16);

  const double cw = pw / nx, chh = ph / ny;
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const double v = values[j * nx + i];
      std::string fill = "#bbbbbb";
      if (std::isfinite(v) && (!style.log_color || v > 0)) {
        int r, g, b;
        colormap(unit(v), r, g, b);
        char c[16];
        std::snprintf(c, sizeof c, "#%02x%02x%02x", r, g, b);
        fill = c;
      }
      // row 0 at the bottom
      const double x = ml + i * cw;
      const double y = mt + ph - (j + 1) * chh;
      out << "<rect x=\"" << fmt_coord(x) << "\" y=\"" << fmt_coord(y)
          << "\" width=\"" << fmt_coord(cw) << "\" height=\""
          << fmt_coord(chh) << "\" fill=\"" << fill
          << "\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
    }
  }
  for (std::size_t i = 0; i < nx; ++i)
    text(out, ml + (i + 0.5) * cw, mt + ph + 18, fmt(xs[i]), "middle", 12);
  for (std::size_t j = 0; j < ny; ++j)
    text(out, ml - 8, mt + ph - (j + 0.5) * chh + 4, fmt(ys[j]), "end", 12);
  if (!style.x_label.empty())
    text(out, ml + pw / 2, style.height - 14, style.x_label, "middle", 14);
  if (!style.y_label.empty()) {
    char extra[128];
    std::snprintf(extra, sizeof extra, " transform=\"rotate(-90 %.2f %.2f)\"",
                  20.0, mt + ph / 2);
    text(out, 20, mt + ph / 2, style.y_label, "middle", 14, extra);
  }

  // color bar
  const double bx = ml + pw + 18, bw = 16;
  const int bn = 64;
  for (int k = 0; k < bn; ++k) {
    int r, g, b;
    colormap((k + 0.5) / bn, r, g, b);
    char c[16];
    std::snprintf(c, sizeof c, "#%02x%02x%02x", r, g, b);
    const double y = mt + ph - (k + 1) * (ph / bn);
    out << "<rect x=\"" << fmt_coord(bx) << "\" y=\"" << fmt_coord(y)
        << "\" width=\"" << fmt_coord(bw) << "\" height=\""
        << fmt_coord(ph / bn + 0.5) << "\" fill=\"" << c << "\"/>\n";
  }
  text(out, bx + bw + 6, mt + ph + 4, fmt(vmin), "start", 11);
  text(out, bx + bw + 6, mt + 8, fmt(vmax), "start", 11);
  out << "</svg>\n";
  return out.str();
}

}  // namespace fiberamp
