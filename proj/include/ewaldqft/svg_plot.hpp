#pragma once

#include "ewaldqft/bench.hpp"
#include "ewaldqft/csv.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ewaldqft {

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> err; ///< symmetric error bar, empty for none
    bool dashed = false;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = true;
    bool log_y = true;
    std::vector<PlotSeries> series;
    std::optional<double> marker_x; ///< vertical marker, e.g. a crossover
    std::string marker_label;
};

/// Static SVG line chart with error bars. Output depends only on the input.
std::string render_svg(const PlotSpec& plot);

/// Builds the chart for a breakdown, timing or error CSV (detected from the
/// `experiment` meta line) after a schema check.
PlotSpec plot_for(const CsvTable& table);
std::string render_csv_plot(const CsvTable& table);

} // namespace ewaldqft
