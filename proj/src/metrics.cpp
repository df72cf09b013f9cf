#include "windfc/metrics.hpp"

#include "windfc/common.hpp"
#include "windfc/errors.hpp"

#include <cmath>

namespace windfc::metrics {

namespace {
constexpr double kMapeFloor = 1e-9;
}

MetricReport evaluate(std::span<const double> y_true, std::span<const double> y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw data_error("evaluate: length mismatch (" + std::to_string(y_true.size()) +
                         " vs " + std::to_string(y_pred.size()) + ")");
    }
    if (y_true.empty()) {
        throw data_error("evaluate: empty input");
    }
    const std::size_t n = y_true.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(y_true[i]) || !std::isfinite(y_pred[i])) {
            throw data_error("evaluate: non-finite value at index " + std::to_string(i));
        }
    }

    double abs_sum = 0.0, sq_sum = 0.0, smape_sum = 0.0;
    double mape_sum = 0.0;
    std::size_t mape_count = 0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean_y += y_true[i];
    mean_y /= static_cast<double>(n);

    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double err = y_true[i] - y_pred[i];
        const double aerr = std::abs(err);
        abs_sum += aerr;
        sq_sum += err * err;

        const double denom = (std::abs(y_true[i]) + std::abs(y_pred[i])) / 2.0;
        // 0/0 := 0 when both values are zero
        if (denom > 0.0) smape_sum += aerr / denom;

        if (std::abs(y_true[i]) > kMapeFloor) {
            mape_sum += aerr / std::abs(y_true[i]);
            ++mape_count;
        }

        ss_res += err * err;
        const double dev = y_true[i] - mean_y;
        ss_tot += dev * dev;
    }

    MetricReport r;
    r.n = n;
    r.mae = abs_sum / static_cast<double>(n);
    r.rmse = std::sqrt(sq_sum / static_cast<double>(n));
    r.smape = smape_sum / static_cast<double>(n) * 100.0;
    r.mape_excluded = n - mape_count;
    if (mape_count > 0) {
        r.mape = mape_sum / static_cast<double>(mape_count) * 100.0;
    }
    if (ss_tot > 0.0) {
        r.r2 = 1.0 - ss_res / ss_tot;
    }
    return r;
}

std::string MetricReport::csv_header() {
    return "mae,rmse,mape,mape_excluded,smape,r2,n";
}

std::string MetricReport::csv_row(int precision) const {
    std::string row = fmt_fixed(mae, precision);
    row += ',' + fmt_fixed(rmse, precision);
    row += ',';
    if (mape) row += fmt_fixed(*mape, precision);
    row += ',' + std::to_string(mape_excluded);
    row += ',' + fmt_fixed(smape, precision);
    row += ',';
    if (r2) row += fmt_fixed(*r2, precision);
    row += ',' + std::to_string(n);
    return row;
}

std::string MetricReport::json(int precision) const {
    std::string out = "{\"mae\":" + fmt_fixed(mae, precision);
    out += ",\"rmse\":" + fmt_fixed(rmse, precision);
    out += ",\"mape\":";
    out += mape ? fmt_fixed(*mape, precision) : "null";
    out += ",\"mape_excluded\":" + std::to_string(mape_excluded);
    out += ",\"smape\":" + fmt_fixed(smape, precision);
    out += ",\"r2\":";
    out += r2 ? fmt_fixed(*r2, precision) : "null";
    out += ",\"n\":" + std::to_string(n);
    out += '}';
    return out;
}

} // namespace windfc::metrics
