#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace windfc::metrics {

// One evaluation of predictions against truth. MAE/RMSE are in target units,
// MAPE/SMAPE in percent, R^2 dimensionless. MAPE skips entries with |y| <= 1e-9
// and reports how many were skipped; R^2 is unset when the truth is constant.
struct MetricReport {
    double mae = 0.0;
    double rmse = 0.0;
    std::optional<double> mape;
    std::size_t mape_excluded = 0;
    double smape = 0.0;
    std::optional<double> r2;
    std::size_t n = 0;

    // Fixed field order: mae,rmse,mape,mape_excluded,smape,r2,n
    static std::string csv_header();
    std::string csv_row(int precision = 6) const;
    std::string json(int precision = 6) const;
};

MetricReport evaluate(std::span<const double> y_true, std::span<const double> y_pred);

} // namespace windfc::metrics
