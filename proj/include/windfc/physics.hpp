#pragma once

#include <array>
#include <span>
#include <string>

namespace windfc::physics {

constexpr double kBetzLimit = 16.0 / 27.0;

// Turbine and site constants. `cp` is not free: it is derived so the cubic
// region meets the rated plateau exactly at `rated_speed` (see derive_cp).
struct TurbineSpec {
    double rotor_diameter = 150.0;   // m
    double hub_height = 100.0;       // m
    double anemometer_height = 3.8;  // m
    double roughness_length = 2e-4;  // m, open sea
    double air_density = 1.2;        // kg/m^3
    double cut_in = 3.0;             // m/s at hub
    double rated_speed = 12.4;       // m/s at hub
    double cut_out = 25.0;           // m/s at hub
    double rated_power = 8e6;        // W
    double cp = 0.0;                 // derived; 0 means "not yet derived"

    double swept_area() const;
    void validate() const; // throws numeric_error on inconsistent fields
};

// Spec with cp already derived and fields validated.
TurbineSpec default_turbine();
TurbineSpec turbine_from_json(const std::string& json_text);
TurbineSpec turbine_from_json_file(const std::string& path);
std::string turbine_to_json(const TurbineSpec& spec);

// Logarithmic wind profile: v2 = v1 * ln(h2/z0) / ln(h1/z0).
double extrapolate_speed(double v1, double h1, double h2, double z0);

// The constant anemometer->hub factor for this spec.
double hub_ratio(const TurbineSpec& spec);

// cp making 0.5*rho*A*v_r^3*cp == rated_power; throws if it reaches Betz.
double derive_cp(const TurbineSpec& spec);

// Piecewise power curve at hub height, in watts.
double power_from_speed(double v_hub, const TurbineSpec& spec);

struct SpeedBand {
    double start;  // cut-in mapped to anemometer height
    double rated;
    double cutoff;
};

SpeedBand speed_band_at_anemometer(const TurbineSpec& spec);

// Share of the band-clipped energy in the unclipped cubic-law energy of a
// speed series measured at anemometer height, plus time-in-band fractions
// for the four operating regions (below cut-in, cubic, rated, above cut-out).
struct ConversionStats {
    double fraction = 0.0;
    bool all_zero = false;
    std::array<double, 4> band_time_fractions{};
    double clipped_energy = 0.0;   // sum of banded power, W
    double unclipped_energy = 0.0; // sum of 0.5*rho*A*v^3*cp, W
    std::string json(int precision = 6) const;
};

ConversionStats conversion_fraction(std::span<const double> speeds_at_anemometer,
                                    const TurbineSpec& spec);

} // namespace windfc::physics
