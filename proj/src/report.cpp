#include "windfc/report.hpp"

#include "windfc/common.hpp"
#include "windfc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace windfc::report {

RadarChart normalize_for_radar(const std::vector<std::string>& metric_names,
                               const std::vector<MetricRow>& rows,
                               const std::vector<std::string>& higher_is_better) {
    if (rows.size() < 2) throw data_error("radar: need at least 2 rows to compare");
    if (metric_names.size() < 3) throw data_error("radar: need at least 3 metrics");
    for (const auto& row : rows) {
        if (row.values.size() != metric_names.size()) {
            throw data_error("radar: row '" + row.label + "' has the wrong metric count");
        }
        for (double v : row.values) {
            if (!std::isfinite(v)) {
                throw data_error("radar: non-finite metric in row '" + row.label + "'");
            }
        }
    }

    // Merge rows whose raw metric vectors are identical.
    std::vector<MetricRow> merged;
    for (const auto& row : rows) {
        bool found = false;
        for (auto& m : merged) {
            if (m.values == row.values) {
                m.label += " = " + row.label;
                found = true;
                break;
            }
        }
        if (!found) merged.push_back(row);
    }

    RadarChart chart;
    chart.axes = metric_names;
    chart.entries.resize(merged.size());
    for (std::size_t i = 0; i < merged.size(); ++i) {
        chart.entries[i].label = merged[i].label;
        chart.entries[i].values.resize(metric_names.size());
    }

    for (std::size_t m = 0; m < metric_names.size(); ++m) {
        double lo = merged[0].values[m], hi = merged[0].values[m];
        for (const auto& row : merged) {
            lo = std::min(lo, row.values[m]);
            hi = std::max(hi, row.values[m]);
        }
        const bool direct = std::find(higher_is_better.begin(), higher_is_better.end(),
                                      metric_names[m]) != higher_is_better.end();
        if (hi == lo) {
            // constant axis carries no ranking information
            chart.flagged_axes.push_back(static_cast<int>(m));
            for (auto& e : chart.entries) e.values[m] = 0.5;
            continue;
        }
        for (std::size_t i = 0; i < merged.size(); ++i) {
            const double norm = (merged[i].values[m] - lo) / (hi - lo);
            chart.entries[i].values[m] = direct ? norm : 1.0 - norm;
        }
    }
    return chart;
}

namespace {

constexpr double kSize = 640.0;
constexpr double kCenter = 320.0;
constexpr double kRadius = 230.0;

constexpr std::array<const char*, 10> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string point(double angle, double r) {
    const double x = kCenter + r * std::cos(angle);
    const double y = kCenter + r * std::sin(angle);
    return fmt_fixed(x, 6) + ',' + fmt_fixed(y, 6);
}

} // namespace

std::string emit_svg(const RadarChart& chart) {
    if (chart.entries.empty()) throw data_error("radar: no entries to draw");
    if (chart.axes.size() < 3) throw data_error("radar: need at least 3 axes");
    const std::size_t A = chart.axes.size();
    auto angle_of = [&](std::size_t i) {
        return -std::numbers::pi / 2.0 +
               2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(A);
    };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           fmt_fixed(kSize, 0) + "\" height=\"" + fmt_fixed(kSize, 0) + "\" viewBox=\"0 0 " +
           fmt_fixed(kSize, 0) + " " + fmt_fixed(kSize, 0) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (int ring = 1; ring <= 4; ++ring) {
        const double r = kRadius * ring / 4.0;
        std::string pts;
        for (std::size_t i = 0; i < A; ++i) {
            if (i) pts += ' ';
            pts += point(angle_of(i), r);
        }
        svg += "<polygon class=\"ring\" points=\"" + pts +
               "\" fill=\"none\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    }
    for (std::size_t i = 0; i < A; ++i) {
        svg += "<line class=\"spoke\" x1=\"" + fmt_fixed(kCenter, 6) + "\" y1=\"" +
               fmt_fixed(kCenter, 6) + "\" x2=\"";
        const double x = kCenter + kRadius * std::cos(angle_of(i));
        const double y = kCenter + kRadius * std::sin(angle_of(i));
        svg += fmt_fixed(x, 6) + "\" y2=\"" + fmt_fixed(y, 6) +
               "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
        const double lx = kCenter + (kRadius + 18.0) * std::cos(angle_of(i));
        const double ly = kCenter + (kRadius + 18.0) * std::sin(angle_of(i));
        svg += "<text class=\"axis-label\" x=\"" + fmt_fixed(lx, 6) + "\" y=\"" + fmt_fixed(ly, 6) +
               "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">" +
               chart.axes[i] + "</text>\n";
    }

    for (std::size_t e = 0; e < chart.entries.size(); ++e) {
        const auto& entry = chart.entries[e];
        const char* color = kPalette[e % kPalette.size()];
        std::string pts;
        for (std::size_t i = 0; i < A; ++i) {
            if (i) pts += ' ';
            const double v = std::clamp(entry.values[i], 0.0, 1.0);
            pts += point(angle_of(i), kRadius * v);
        }
        svg += "<polygon class=\"entry\" points=\"" + pts + "\" fill=\"" + std::string(color) +
               "\" fill-opacity=\"0.15\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    }
    for (std::size_t e = 0; e < chart.entries.size(); ++e) {
        const char* color = kPalette[e % kPalette.size()];
        const double y = 24.0 + 18.0 * static_cast<double>(e);
        svg += "<rect class=\"legend-swatch\" x=\"12\" y=\"" + fmt_fixed(y - 10.0, 6) +
               "\" width=\"12\" height=\"12\" fill=\"" + std::string(color) + "\"/>\n";
        svg += "<text class=\"legend-label\" x=\"30\" y=\"" + fmt_fixed(y, 6) +
               "\" font-family=\"sans-serif\" font-size=\"13\">" + chart.entries[e].label +
               "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write file '" + path + "'");
    out << content;
    if (!out) throw data_error("failed while writing '" + path + "'");
}

namespace {

std::string json_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default: out += c;
        }
    }
    out += '"';
    return out;
}

void append_metric_rows(std::string& out, const experiments::MatrixCell& cell,
                        const std::string& space, const metrics::MetricReport& rep,
                        int precision) {
    const std::string prefix = std::to_string(cell.spec.id) + ',' +
                               std::to_string(cell.spec.mode) + ',' + cell.kind + ',' + space + ',';
    out += prefix + "mae," + fmt_fixed(rep.mae, precision) + '\n';
    out += prefix + "rmse," + fmt_fixed(rep.rmse, precision) + '\n';
    out += prefix + "mape,";
    if (rep.mape) out += fmt_fixed(*rep.mape, precision);
    out += '\n';
    out += prefix + "smape," + fmt_fixed(rep.smape, precision) + '\n';
    out += prefix + "r2,";
    if (rep.r2) out += fmt_fixed(*rep.r2, precision);
    out += '\n';
}

} // namespace

std::string matrix_csv(const experiments::MatrixResult& results, int precision) {
    std::string out = "case,mode,kind,space,metric,value\n";
    for (const auto& cell : results.cells) {
        if (!cell.result) continue;
        append_metric_rows(out, cell, "native:" + cell.result->native_space, cell.result->native,
                           precision);
        append_metric_rows(out, cell, "power_mw", cell.result->power, precision);
    }
    return out;
}

std::string matrix_json(const experiments::MatrixResult& results,
                        const experiments::ImprovementStat* improvement, int precision) {
    std::string out = "{\"cases\":[";
    bool first = true;
    for (const auto& cell : results.cells) {
        if (!first) out += ',';
        first = false;
        out += "{\"case\":" + std::to_string(cell.spec.id);
        out += ",\"mode\":" + std::to_string(cell.spec.mode);
        out += ",\"kind\":\"" + cell.kind + '"';
        if (cell.result) {
            out += ",\"native_space\":\"" + cell.result->native_space + '"';
            out += ",\"native\":" + cell.result->native.json(precision);
            out += ",\"power_mw\":" + cell.result->power.json(precision);
            out += ",\"target_degenerate\":";
            out += cell.result->target_degenerate ? "true" : "false";
        } else {
            out += ",\"error\":" + json_quote(cell.error);
        }
        out += '}';
    }
    out += ']';
    if (improvement) {
        out += ",\"improvement\":" + improvement->json(precision);
    }
    out += '}';
    return out;
}

std::string sweep_csv(const experiments::SweepResult& sweep, int precision) {
    std::string out = "past_steps,horizon_steps,status,mae,rmse,mape,smape,r2,n\n";
    for (const auto& cell : sweep.cells) {
        out += std::to_string(cell.past_steps) + ',' + std::to_string(cell.horizon_steps) + ',';
        if (cell.skipped) {
            out += "skipped,,,,,,\n";
            continue;
        }
        out += "ok,";
        out += fmt_fixed(cell.report.mae, precision) + ',';
        out += fmt_fixed(cell.report.rmse, precision) + ',';
        if (cell.report.mape) out += fmt_fixed(*cell.report.mape, precision);
        out += ',';
        out += fmt_fixed(cell.report.smape, precision) + ',';
        if (cell.report.r2) out += fmt_fixed(*cell.report.r2, precision);
        out += ',' + std::to_string(cell.report.n) + '\n';
    }
    return out;
}

} // namespace windfc::report
