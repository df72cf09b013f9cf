#pragma once

#include "windfc/ingest.hpp"

#include <cstdint>

namespace windfc::fixture {

// Synthetic buoy series: Weibull-marginal wind speeds driven through a
// Gaussian copula whose driver is AR(2) on the latent scale (ar_b = 0 gives
// plain AR(1)), plus gust, pressure and a mutually correlated temperature
// block shaped like the real station's columns.
struct FixtureConfig {
    std::size_t rows = 20000;
    std::uint64_t seed = 1;
    int cadence_minutes = 10;
    double weibull_shape = 2.0;
    double weibull_scale = 6.8; // at anemometer height
    double ar_a = 1.6;          // latent driver: g_t = a g_{t-1} + b g_{t-2} + s e_t
    double ar_b = -0.64;
    double temp_coupling = 0.25; // latent wind <- slow temperature driver
};

ingest::SeriesDataset generate(const FixtureConfig& config);

} // namespace windfc::fixture
