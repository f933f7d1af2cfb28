#include "adrev/app/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "adrev/error.hpp"

namespace adrev::app {

namespace {

constexpr double kWidth = 640, kHeight = 360;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string header(const std::string& title, double height) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(height) +
         "\" viewBox=\"0 0 " + fmt(kWidth) + " " + fmt(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n"
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
         "<text x=\"" + fmt(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + xml_escape(title) +
         "</text>\n";
}

}  // namespace

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<double>& values) {
  if (labels.size() != values.size()) throw ShapeError("bar_chart: labels and values differ in length");
  constexpr double row = 26, label_width = 170;
  const double height = kTop + row * static_cast<double>(labels.size()) + 20;
  double top = 0.0;
  for (double v : values) top = std::max(top, v);
  if (top <= 0.0) top = 1.0;
  const double span = kWidth - label_width - kRight - 60;

  std::string svg = header(title, height);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double y = kTop + row * static_cast<double>(i);
    const double w = std::max(0.0, values[i]) / top * span;
    svg += "<text x=\"" + fmt(label_width - 8) + "\" y=\"" + fmt(y + row * 0.65) + "\" text-anchor=\"end\">" +
           xml_escape(labels[i]) + "</text>\n";
    svg += "<rect x=\"" + fmt(label_width) + "\" y=\"" + fmt(y + 4) + "\" width=\"" + fmt(w) + "\" height=\"" +
           fmt(row - 8) + "\" fill=\"#4c72b0\"/>\n";
    svg += "<text x=\"" + fmt(label_width + w + 6) + "\" y=\"" + fmt(y + row * 0.65) + "\">" + tick(values[i]) +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string line_chart(const std::string& title, const std::vector<double>& x, const std::vector<LineSeries>& series,
                       const std::optional<ShadedBand>& band, const std::string& x_label,
                       const std::string& y_label) {
  if (x.empty()) throw ContractError("line_chart: no points");
  double y_min = std::numeric_limits<double>::infinity(), y_max = -y_min;
  auto extend = [&](const std::vector<double>& ys) {
    if (ys.size() != x.size()) throw ShapeError("line_chart: series length differs from x");
    for (double v : ys) {
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
  };
  for (const auto& s : series) extend(s.y);
  if (band) {
    extend(band->lower);
    extend(band->upper);
  }
  if (!(y_max > y_min)) {
    y_min -= 1.0;
    y_max += 1.0;
  }
  const double x_min = *std::min_element(x.begin(), x.end());
  double x_max = *std::max_element(x.begin(), x.end());
  if (x_max == x_min) x_max = x_min + 1.0;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - x_min) / (x_max - x_min) * pw; };
  auto py = [&](double v) { return kTop + (1.0 - (v - y_min) / (y_max - y_min)) * ph; };

  std::string svg = header(title, kHeight);
  svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop + ph) + "\" x2=\"" + fmt(kLeft + pw) + "\" y2=\"" +
         fmt(kTop + ph) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(kLeft) + "\" y2=\"" +
         fmt(kTop + ph) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double yv = y_min + (y_max - y_min) * i / 4.0;
    const double xv = x_min + (x_max - x_min) * i / 4.0;
    svg += "<text x=\"" + fmt(kLeft - 6) + "\" y=\"" + fmt(py(yv) + 4) + "\" text-anchor=\"end\">" + tick(yv) +
           "</text>\n";
    svg += "<text x=\"" + fmt(px(xv)) + "\" y=\"" + fmt(kTop + ph + 18) + "\" text-anchor=\"middle\">" + tick(xv) +
           "</text>\n";
  }
  if (!x_label.empty()) {
    svg += "<text x=\"" + fmt(kLeft + pw / 2) + "\" y=\"" + fmt(kHeight - 10) + "\" text-anchor=\"middle\">" +
           xml_escape(x_label) + "</text>\n";
  }
  if (!y_label.empty()) {
    svg += "<text x=\"16\" y=\"" + fmt(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           fmt(kTop + ph / 2) + ")\">" + xml_escape(y_label) + "</text>\n";
  }
  if (band) {
    std::string points;
    for (std::size_t i = 0; i < x.size(); ++i) points += fmt(px(x[i])) + "," + fmt(py(band->upper[i])) + " ";
    for (std::size_t i = x.size(); i-- > 0;) points += fmt(px(x[i])) + "," + fmt(py(band->lower[i])) + " ";
    svg += "<polygon points=\"" + points + "\" fill=\"" + band->color + "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
  }
  double legend_y = kTop + 4;
  for (const auto& s : series) {
    std::string points;
    for (std::size_t i = 0; i < x.size(); ++i) points += fmt(px(x[i])) + "," + fmt(py(s.y[i])) + " ";
    svg += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"" +
           (s.dashed ? " stroke-dasharray=\"5,3\"" : "") + "/>\n";
    svg += "<text x=\"" + fmt(kLeft + pw - 4) + "\" y=\"" + fmt(legend_y + 8) + "\" text-anchor=\"end\" fill=\"" +
           s.color + "\">" + xml_escape(s.label) + "</text>\n";
    legend_y += 16;
  }
  svg += "</svg>\n";
  return svg;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
}

}  // namespace adrev::app
