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

// Self-contained SVG rendering of a study report: curves over p in [0, 1],
// their bootstrap bands, and vertical threshold markers with interval
// shading. Output bytes depend only on the report.

#ifndef LRPERC_PLOT_HPP_
#define LRPERC_PLOT_HPP_

#include <filesystem>
#include <string>

#include "lrperc/experiments.hpp"

namespace lrperc {

std::string render_svg(const EstimateReport& report);

// Writes render_svg(report) atomically. Throws std::runtime_error if the
// path cannot be written.
void emit_plot(const EstimateReport& report, const std::filesystem::path& path);

}  // namespace lrperc

#endif  // LRPERC_PLOT_HPP_
