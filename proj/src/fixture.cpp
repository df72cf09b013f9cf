#include "windfc/fixture.hpp"

#include "windfc/errors.hpp"

#include <cmath>

namespace windfc::fixture {

ingest::SeriesDataset generate(const FixtureConfig& config) {
    if (config.rows < 2) throw usage_error("fixture: need at least 2 rows");
    if (!(std::abs(config.ar_b) < 1.0) || !(std::abs(config.ar_a) < 2.0)) {
        throw usage_error("fixture: AR coefficients outside the stationary region");
    }

    std::mt19937_64 rng(derive_seed(config.seed, "fixture"));

    // Stationary variance of the AR(2) driver, used to keep it unit-scale.
    const double a = config.ar_a;
    const double b = config.ar_b;
    const double denom = (1.0 + b) * ((1.0 - b) * (1.0 - b) - a * a);
    if (!(denom > 0.0)) throw usage_error("fixture: AR coefficients outside the stationary region");
    const double innovation_sd = std::sqrt(denom / (1.0 - b));

    const double couple = config.temp_coupling;
    const double wind_weight = std::sqrt(1.0 - couple * couple);

    // Latent states, burned in so every column starts stationary.
    double w1 = 0.0, w2 = 0.0;      // wind driver (AR(2))
    double tau = 0.0;               // slow shared temperature driver
    double pres_ar = 0.0;           // pressure's own component
    double wdir_ar = 0.0;           // direction wanders independently of wind
    constexpr double kTauPhi = 0.998;
    constexpr double kPresPhi = 0.995;
    constexpr double kWdirPhi = 0.9;
    const double tau_sd = std::sqrt(1.0 - kTauPhi * kTauPhi);
    const double pres_sd = std::sqrt(1.0 - kPresPhi * kPresPhi);
    const double wdir_sd = std::sqrt(1.0 - kWdirPhi * kWdirPhi);

    const std::size_t burn_in = 4000;
    const minute_t start = minutes_from_civil(2021, 7, 25, 22, 30);

    ingest::SeriesDataset ds;
    ds.station_id = "synthetic";
    ds.cadence_minutes = config.cadence_minutes;
    ds.records.reserve(config.rows);

    for (std::size_t i = 0; i < burn_in + config.rows; ++i) {
        const double w_new = a * w1 + b * w2 + innovation_sd * normal01(rng);
        w2 = w1;
        w1 = w_new;
        tau = kTauPhi * tau + tau_sd * normal01(rng);
        pres_ar = kPresPhi * pres_ar + pres_sd * normal01(rng);
        wdir_ar = kWdirPhi * wdir_ar + wdir_sd * normal01(rng);
        const double gust_noise = std::abs(normal01(rng));
        const double e_atmp = normal01(rng);
        const double e_wtmp = normal01(rng);
        const double e_dewp = normal01(rng);
        if (i < burn_in) continue;

        const double g = couple * tau + wind_weight * w1;
        const double u = normal_cdf(g);
        const double wspd = weibull_from_u(u, config.weibull_shape, config.weibull_scale);

        ingest::MetRecord rec;
        rec.timestamp = start + static_cast<minute_t>(i - burn_in) * config.cadence_minutes;
        double wdir = std::fmod(160.0 + 80.0 * wdir_ar, 360.0);
        if (wdir < 0.0) wdir += 360.0;
        rec.values = {wdir,
                      wspd,
                      1.12 * wspd + 0.4 * gust_noise,
                      1013.0 - 2.7 * g + 4.5 * pres_ar,
                      27.0 + 3.0 * tau + 0.4 * e_atmp,
                      28.5 + 2.7 * tau + 0.4 * e_wtmp,
                      23.0 + 2.8 * tau + 0.75 * e_dewp};
        rec.flags.fill(FieldFlag::observed);
        ds.records.push_back(rec);
    }
    return ds;
}

} // namespace windfc::fixture
