#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace adrev::app {

struct LineSeries {
  std::string label;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct ShadedBand {
  std::vector<double> lower;
  std::vector<double> upper;
  std::string color = "#1f77b4";
};

/// Horizontal bar chart, one bar per label.
std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<double>& values);

/// Lines over a shared x axis with an optional shaded interval.
std::string line_chart(const std::string& title, const std::vector<double>& x, const std::vector<LineSeries>& series,
                       const std::optional<ShadedBand>& band = std::nullopt, const std::string& x_label = "",
                       const std::string& y_label = "");

std::string xml_escape(const std::string& text);
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace adrev::app
