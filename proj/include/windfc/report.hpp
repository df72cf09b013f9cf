#pragma once

#include "windfc/experiments.hpp"

#include <string>
#include <vector>

namespace windfc::report {

// One radar entry per compared thing (model or case), axes are metrics,
// values min-max normalized into [0,1] with error metrics inverted so a
// bigger polygon is always better.
struct RadarChart {
    std::vector<std::string> axes;
    struct Entry {
        std::string label;
        std::vector<double> values; // one per axis, in [0,1]
    };
    std::vector<Entry> entries;
    std::vector<int> flagged_axes; // constant across rows, pinned at 0.5
};

struct MetricRow {
    std::string label;
    std::vector<double> values; // one per metric name
};

// `higher_is_better` marks metrics normalized directly (R^2); everything else
// is treated as an error metric and inverted. Rows with identical raw metric
// vectors are merged under a joined label.
RadarChart normalize_for_radar(const std::vector<std::string>& metric_names,
                               const std::vector<MetricRow>& rows,
                               const std::vector<std::string>& higher_is_better = {"r2"});

// Standalone SVG 1.1, deterministic bytes for identical charts.
std::string emit_svg(const RadarChart& chart);
void write_text_file(const std::string& path, const std::string& content);

// Long-format CSV of matrix results: case,mode,kind,space,metric,value.
std::string matrix_csv(const experiments::MatrixResult& results, int precision = 6);
// Nested JSON document with per-case reports and the improvement statistic.
std::string matrix_json(const experiments::MatrixResult& results,
                        const experiments::ImprovementStat* improvement, int precision = 6);

std::string sweep_csv(const experiments::SweepResult& sweep, int precision = 6);

} // namespace windfc::report
