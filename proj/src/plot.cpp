// Copyright 2026 The lrperc Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lrperc/plot.hpp"

#include <array>
#include <cmath>

#include <fmt/format.h>

namespace lrperc {
namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 480;
constexpr double kLeft = 70;
constexpr double kRight = 200;
constexpr double kTop = 40;
constexpr double kBottom = 60;

constexpr std::array<const char*, 8> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

double x_of(double p) { return kLeft + p * (kWidth - kLeft - kRight); }
double y_of(double q) { return kHeight - kBottom - q * (kHeight - kTop - kBottom); }

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string num(double x) { return fmt::format("{:.2f}", x); }

void axes(std::string& svg) {
  const double x0 = x_of(0), x1 = x_of(1), y0 = y_of(0), y1 = y_of(1);
  svg += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
      "stroke=\"#000\"/>\n",
      num(x0), num(y1), num(x1 - x0), num(y0 - y1));
  for (int i = 0; i <= 10; ++i) {
    const double t = i / 10.0;
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000\"/>"
        "<text x=\"{0}\" y=\"{3}\" font-size=\"11\" "
        "text-anchor=\"middle\">{4:.1f}</text>\n",
        num(x_of(t)), num(y0), num(y0 + 5), num(y0 + 18), t);
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#000\"/>"
        "<text x=\"{3}\" y=\"{4}\" font-size=\"11\" "
        "text-anchor=\"end\">{5:.1f}</text>\n",
        num(x0 - 5), num(y_of(t)), num(x0), num(x0 - 8), num(y_of(t) + 4), t);
  }
  svg += fmt::format(
      "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">p"
      "</text>\n",
      num((x0 + x1) / 2), num(kHeight - 15));
  svg += fmt::format(
      "<text x=\"18\" y=\"{0}\" font-size=\"13\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 18 {0})\">probability</text>\n",
      num((y0 + y1) / 2));
}

}  // namespace

std::string render_svg(const EstimateReport& report) {
  std::string svg = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" "
      "height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"#fff\"/>\n",
      kWidth, kHeight);
  if (!report.title.empty()) {
    svg += fmt::format(
        "<text x=\"{}\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">{}"
        "</text>\n",
        num((x_of(0) + x_of(1)) / 2), escape(report.title));
  }
  axes(svg);

  int legend = 0;
  auto legend_entry = [&](const std::string& color, const std::string& text) {
    const double y = kTop + 10 + 18 * legend++;
    const double x = kWidth - kRight + 15;
    svg += fmt::format(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" "
        "stroke-width=\"2\"/><text x=\"{}\" y=\"{}\" font-size=\"11\">{}"
        "</text>\n",
        num(x), num(y), num(x + 20), num(y), color, num(x + 26), num(y + 4),
        escape(text));
  };

  for (std::size_t c = 0; c < report.curves.size(); ++c) {
    const CurveRecord& rec = report.curves[c];
    const std::string color = kPalette[c % kPalette.size()];
    const auto& p = rec.curve.p;
    const Band& band = rec.band;
    if (band.lo.size() == p.size() && !p.empty()) {
      std::string points;
      bool complete = true;
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (std::isnan(band.hi[i])) complete = false;
        points += fmt::format("{},{} ", num(x_of(p[i])), num(y_of(band.hi[i])));
      }
      for (std::size_t i = p.size(); i-- > 0;) {
        if (std::isnan(band.lo[i])) complete = false;
        points += fmt::format("{},{} ", num(x_of(p[i])), num(y_of(band.lo[i])));
      }
      if (complete) {
        svg += fmt::format(
            "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.2\" "
            "stroke=\"none\"/>\n",
            points, color);
      }
    }
    std::string points;
    for (std::size_t i = 0; i < p.size(); ++i) {
      points += fmt::format("{},{} ", num(x_of(p[i])), num(y_of(rec.curve.q[i])));
    }
    svg += fmt::format(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" "
        "stroke-width=\"1.5\"/>\n",
        points, color);
    legend_entry(color, rec.label);
  }

  for (std::size_t m = 0; m < report.markers.size(); ++m) {
    const ThresholdMarker& mk = report.markers[m];
    if (std::isnan(mk.estimate)) continue;
    const std::string color = "#444";
    if (!std::isnan(mk.ci.lo) && !std::isnan(mk.ci.hi)) {
      svg += fmt::format(
          "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" "
          "fill-opacity=\"0.15\"/>\n",
          num(x_of(mk.ci.lo)), num(y_of(1)),
          num(std::max(0.5, x_of(mk.ci.hi) - x_of(mk.ci.lo))),
          num(y_of(0) - y_of(1)), color);
    }
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"{3}\" "
        "stroke-dasharray=\"4 3\"/><text x=\"{4}\" y=\"{5}\" "
        "font-size=\"11\">{6} {7:.4f}</text>\n",
        num(x_of(mk.estimate)), num(y_of(0)), num(y_of(1)), color,
        num(x_of(mk.estimate) + 3), num(y_of(1) + 14 + 14 * m),
        escape(mk.label), mk.estimate);
  }
  svg += "</svg>\n";
  return svg;
}

void emit_plot(const EstimateReport& report,
               const std::filesystem::path& path) {
  write_file_atomic(path, render_svg(report));
}

}  // namespace lrperc
