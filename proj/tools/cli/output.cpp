// Copyright 2026 The dissipent Authors
//
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

#include "cli/output.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dissipent::cli {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

constexpr std::array<const char*, 8> kPalette{"#d62728", "#1f77b4", "#2ca02c", "#000000",
                                              "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

std::string tick_label(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

// Roughly five ticks at 1/2/5 multiples.
std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return out;
}

}  // namespace

std::string render_svg(const LineChart& chart) {
  auto fx = [&](double x) { return chart.log_x ? std::log10(x) : x; };
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const auto& s : chart.series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, fx(s.x[i]));
      xmax = std::max(xmax, fx(s.x[i]));
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
    ymin = 0.0;
    ymax = 1.0;
  }
  if (chart.y_range) std::tie(ymin, ymax) = *chart.y_range;
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (fx(x) - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(chart.title) << "</text>\n";
  os << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
     << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";

  for (double t : ticks(xmin, xmax)) {
    const double x = kLeft + (t - xmin) / (xmax - xmin) * pw;
    os << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(x) << "\" y2=\""
       << num(kTop + ph + 5) << "\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + ph + 19)
       << "\" text-anchor=\"middle\" font-size=\"11\">"
       << tick_label(chart.log_x ? std::pow(10.0, t) : t) << "</text>\n";
  }
  for (double t : ticks(ymin, ymax)) {
    const double y = py(t);
    os << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft)
       << "\" y2=\"" << num(y) << "\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y + 4)
       << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(t) << "</text>\n";
  }
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12)
     << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(chart.x_label) << "</text>\n";
  os << "<text transform=\"translate(18," << num(kTop + ph / 2)
     << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" << escape(chart.y_label)
     << "</text>\n";

  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const auto& s = chart.series[k];
    const char* color = kPalette[k % kPalette.size()];
    std::ostringstream pts;
    bool open = false;
    auto flush = [&]() {
      if (open) {
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\""
           << pts.str() << "\"/>\n";
      }
      pts.str({});
      open = false;
    };
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      pts << (open ? " " : "") << num(px(s.x[i])) << ',' << num(py(s.y[i]));
      open = true;
      if (s.markers) {
        os << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i]))
           << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
      }
    }
    flush();
    const double ly = kTop + 14 + 20 * static_cast<double>(k);
    os << "<line x1=\"" << num(kLeft + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\""
       << num(kLeft + pw + 36) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << num(kLeft + pw + 42) << "\" y=\"" << num(ly + 4) << "\" font-size=\"12\">"
       << escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace dissipent::cli
