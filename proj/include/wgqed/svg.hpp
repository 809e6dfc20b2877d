#pragma once

// Minimal self-contained SVG charts for result directories.

#include <string>
#include <vector>

namespace wgqed::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series);

struct BarGroup {
  std::string label;
  std::vector<double> values;  // one per bar series
};

std::string bar_chart(const std::string& title, const std::vector<std::string>& series_labels,
                      const std::vector<BarGroup>& groups);

/// Palette entry i (cycles).
std::string color(std::size_t i);

}  // namespace wgqed::svg
