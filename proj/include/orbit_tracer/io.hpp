// Copyright 2026 The orbit-tracer Authors
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

#ifndef ORBIT_TRACER_IO_HPP_
#define ORBIT_TRACER_IO_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace orbit_tracer::io {

/// Writes `content` to a temporary file next to `path` and renames it into
/// place. Either the old file or the complete new file is visible.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::size_t> markers;  // indices drawn as circles
  bool points_only = false;          // scatter instead of polyline
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 720;
  int height = 480;
};

/// Standalone SVG with one polyline (or point set) per series, linear axes
/// and a legend. Identical input gives identical bytes.
std::string render_svg(const std::vector<Series>& series, const PlotSpec& spec);

void emit_svg(const std::vector<Series>& series, const PlotSpec& spec, const std::filesystem::path& path);

}  // namespace orbit_tracer::io

#endif  // ORBIT_TRACER_IO_HPP_
