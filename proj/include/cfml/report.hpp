#pragma once

#include <string>
#include <vector>

#include "cfml/config.hpp"

namespace cfml {

std::string svg_bar_chart(const std::string& title, const std::vector<std::string>& labels,
                          const std::vector<double>& values);

std::string svg_line_chart(const std::string& title, const std::vector<std::string>& series_names,
                           const std::vector<std::vector<double>>& series,
                           const std::string& x_label, const std::string& y_label);

// Reads whatever stage CSVs exist under cfg.output and writes summary.md
// (plus SVG charts when cfg.emit_svg).
void run_report(const ExperimentConfig& cfg);

// SVG rendering shared by `meta` (when emit_svg) and `report`.
void render_charts(const ExperimentConfig& cfg);

} // namespace cfml
