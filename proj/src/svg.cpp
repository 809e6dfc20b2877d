#include "wgqed/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wgqed::svg {

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 70, kRight = 160, kTop = 40, kBottom = 50;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi >= lo)) { lo = 0; hi = 1; }
    if (hi == lo) { lo -= 0.5; hi += 0.5; }
    const double m = 0.05 * (hi - lo);
    lo -= m;
    hi += m;
  }
};

void header(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(title) << "</text>\n";
}

void axes(std::ostringstream& out, const Range& xr, const Range& yr, const std::string& xl,
          const std::string& yl, bool x_ticks) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  out << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\""
      << y0 - y1 << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    const double yv = yr.lo + f * (yr.hi - yr.lo);
    const double py = y0 - f * (y0 - y1);
    out << "<text x=\"" << x0 - 6 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">" << num(yv)
        << "</text>\n";
    if (x_ticks) {
      const double xv = xr.lo + f * (xr.hi - xr.lo);
      const double px = x0 + f * (x1 - x0);
      out << "<text x=\"" << px << "\" y=\"" << y0 + 18 << "\" text-anchor=\"middle\">" << num(xv)
          << "</text>\n";
    }
  }
  if (yr.lo < 0 && yr.hi > 0) {
    const double py = y0 - (0 - yr.lo) / (yr.hi - yr.lo) * (y0 - y1);
    out << "<line x1=\"" << x0 << "\" x2=\"" << x1 << "\" y1=\"" << py << "\" y2=\"" << py
        << "\" stroke=\"#bbb\"/>\n";
  }
  out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">" << escape(xl) << "</text>\n"
      << "<text x=\"16\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (y0 + y1) / 2 << ")\">" << escape(yl) << "</text>\n";
}

void legend_entry(std::ostringstream& out, std::size_t i, const std::string& label,
                  const std::string& col, bool dashed, bool box) {
  const double x = kWidth - kRight + 12, y = kTop + 14 + 18.0 * static_cast<double>(i);
  if (box)
    out << "<rect x=\"" << x << "\" y=\"" << y - 9 << "\" width=\"20\" height=\"10\" fill=\"" << col
        << "\"/>\n";
  else
    out << "<line x1=\"" << x << "\" x2=\"" << x + 20 << "\" y1=\"" << y - 4 << "\" y2=\"" << y - 4
        << "\" stroke=\"" << col << "\" stroke-width=\"2\"" << (dashed ? " stroke-dasharray=\"5,3\"" : "")
        << "/>\n";
  out << "<text x=\"" << x + 26 << "\" y=\"" << y << "\">" << escape(label) << "</text>\n";
}

}  // namespace

std::string color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  return palette[i % (sizeof palette / sizeof palette[0])];
}

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series) {
  Range xr, yr;
  std::size_t points = 0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("line_chart: x/y length mismatch");
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
    points += s.x.size();
  }
  if (points == 0) throw std::invalid_argument("line_chart: no data");
  yr.pad();
  if (xr.hi == xr.lo) xr.pad();

  std::ostringstream out;
  header(out, title);
  axes(out, xr, yr, x_label, y_label, true);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double px = x0 + (s.x[i] - xr.lo) / (xr.hi - xr.lo) * (x1 - x0);
      const double py = y0 - (s.y[i] - yr.lo) / (yr.hi - yr.lo) * (y0 - y1);
      out << num(px) << ',' << num(py) << ' ';
    }
    out << "\"/>\n";
    legend_entry(out, k, s.label, s.color, s.dashed, false);
  }
  out << "</svg>\n";
  return out.str();
}

std::string bar_chart(const std::string& title, const std::vector<std::string>& series_labels,
                      const std::vector<BarGroup>& groups) {
  if (groups.empty() || series_labels.empty()) throw std::invalid_argument("bar_chart: no data");
  Range yr;
  yr.add(0.0);
  for (const auto& g : groups) {
    if (g.values.size() != series_labels.size())
      throw std::invalid_argument("bar_chart: group size does not match the series");
    for (double v : g.values) yr.add(v);
  }
  yr.pad();
  std::ostringstream out;
  header(out, title);
  axes(out, Range{0, 1}, yr, "emitter", "amplitude", false);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  const double slot = (x1 - x0) / static_cast<double>(groups.size());
  const double bar = 0.8 * slot / static_cast<double>(series_labels.size());
  const double zero_y = y0 - (0 - yr.lo) / (yr.hi - yr.lo) * (y0 - y1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double gx = x0 + slot * static_cast<double>(g) + 0.1 * slot;
    for (std::size_t s = 0; s < series_labels.size(); ++s) {
      const double v = groups[g].values[s];
      const double py = y0 - (v - yr.lo) / (yr.hi - yr.lo) * (y0 - y1);
      out << "<rect x=\"" << num(gx + bar * static_cast<double>(s)) << "\" y=\""
          << num(std::min(py, zero_y)) << "\" width=\"" << num(bar) << "\" height=\""
          << num(std::abs(zero_y - py)) << "\" fill=\"" << color(s) << "\"/>\n";
    }
    out << "<text x=\"" << num(gx + 0.4 * slot) << "\" y=\"" << y0 + 18
        << "\" text-anchor=\"middle\">" << escape(groups[g].label) << "</text>\n";
  }
  for (std::size_t s = 0; s < series_labels.size(); ++s)
    legend_entry(out, s, series_labels[s], color(s), false, true);
  out << "</svg>\n";
  return out.str();
}

}  // namespace wgqed::svg
