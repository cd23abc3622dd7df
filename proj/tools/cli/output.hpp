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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace dissipent::cli {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::optional<std::pair<double, double>> y_range;
  bool log_x = false;
};

/// Self-contained SVG, deterministic for identical input.
std::string render_svg(const LineChart& chart);

/// Writes `content` to dir/name, creating dir. Throws std::runtime_error on I/O failure.
void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content);

std::string dump(const nlohmann::ordered_json& j);

/// Complex matrix as {"re": [[...]], "im": [[...]]}.
template <typename Matrix>
nlohmann::ordered_json matrix_json(const Matrix& m) {
  nlohmann::ordered_json re = nlohmann::ordered_json::array();
  nlohmann::ordered_json im = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::ordered_json rr = nlohmann::ordered_json::array();
    nlohmann::ordered_json ri = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

}  // namespace dissipent::cli
