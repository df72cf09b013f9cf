#include "windfc/physics.hpp"

#include "windfc/common.hpp"
#include "windfc/errors.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace windfc::physics {

double TurbineSpec::swept_area() const {
    const double r = rotor_diameter / 2.0;
    return std::numbers::pi * r * r;
}

void TurbineSpec::validate() const {
    if (!(rotor_diameter > 0.0)) throw numeric_error("turbine: rotor_diameter must be > 0");
    if (!(roughness_length > 0.0)) throw numeric_error("turbine: roughness_length must be > 0");
    if (!(air_density > 0.0)) throw numeric_error("turbine: air_density must be > 0");
    if (!(hub_height > roughness_length) || !(anemometer_height > roughness_length)) {
        throw numeric_error("turbine: heights must exceed the roughness length");
    }
    if (!(0.0 < cut_in && cut_in < rated_speed && rated_speed < cut_out)) {
        throw numeric_error("turbine: need 0 < cut_in < rated_speed < cut_out");
    }
    if (!(rated_power > 0.0)) throw numeric_error("turbine: rated_power must be > 0");
    if (!(cp > 0.0 && cp < kBetzLimit)) {
        throw numeric_error("turbine: cp " + fmt_shortest(cp) +
                            " outside (0, 16/27); rated power and rated speed are inconsistent");
    }
}

double extrapolate_speed(double v1, double h1, double h2, double z0) {
    if (!(z0 > 0.0) || !(h1 > z0) || !(h2 > z0)) {
        throw numeric_error("extrapolate_speed: heights must exceed the roughness length");
    }
    if (v1 < 0.0) throw numeric_error("extrapolate_speed: speed must be >= 0");
    return v1 * (std::log(h2 / z0) / std::log(h1 / z0));
}

double hub_ratio(const TurbineSpec& spec) {
    return std::log(spec.hub_height / spec.roughness_length) /
           std::log(spec.anemometer_height / spec.roughness_length);
}

double derive_cp(const TurbineSpec& spec) {
    const double vr3 = spec.rated_speed * spec.rated_speed * spec.rated_speed;
    const double cp = spec.rated_power / (0.5 * spec.air_density * spec.swept_area() * vr3);
    if (!(cp > 0.0) || cp >= kBetzLimit) {
        throw numeric_error("derive_cp: cp " + fmt_shortest(cp) +
                            " reaches the Betz limit; spec inconsistent");
    }
    return cp;
}

double power_from_speed(double v_hub, const TurbineSpec& spec) {
    if (v_hub < spec.cut_in) return 0.0;
    if (v_hub >= spec.cut_out) return 0.0;
    if (v_hub >= spec.rated_speed) return spec.rated_power;
    return 0.5 * spec.air_density * spec.swept_area() * v_hub * v_hub * v_hub * spec.cp;
}

SpeedBand speed_band_at_anemometer(const TurbineSpec& spec) {
    const double r = hub_ratio(spec);
    return SpeedBand{spec.cut_in / r, spec.rated_speed / r, spec.cut_out / r};
}

ConversionStats conversion_fraction(std::span<const double> speeds_at_anemometer,
                                    const TurbineSpec& spec) {
    if (speeds_at_anemometer.empty()) {
        throw data_error("conversion_fraction: empty speed series");
    }
    ConversionStats stats;
    const double half_rho_a_cp = 0.5 * spec.air_density * spec.swept_area() * spec.cp;
    std::array<std::size_t, 4> counts{};
    for (double v1 : speeds_at_anemometer) {
        const double v = extrapolate_speed(v1, spec.anemometer_height, spec.hub_height,
                                           spec.roughness_length);
        stats.clipped_energy += power_from_speed(v, spec);
        stats.unclipped_energy += half_rho_a_cp * v * v * v;
        if (v < spec.cut_in) ++counts[0];
        else if (v < spec.rated_speed) ++counts[1];
        else if (v < spec.cut_out) ++counts[2];
        else ++counts[3];
    }
    const double n = static_cast<double>(speeds_at_anemometer.size());
    for (std::size_t i = 0; i < 4; ++i) {
        stats.band_time_fractions[i] = static_cast<double>(counts[i]) / n;
    }
    if (stats.unclipped_energy > 0.0) {
        stats.fraction = stats.clipped_energy / stats.unclipped_energy;
    } else {
        stats.fraction = 0.0;
        stats.all_zero = true;
    }
    return stats;
}

TurbineSpec default_turbine() {
    TurbineSpec spec;
    spec.cp = derive_cp(spec);
    spec.validate();
    return spec;
}

TurbineSpec turbine_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("turbine config: ") + e.what());
    }
    TurbineSpec spec;
    auto get = [&](const char* key, double& field) {
        if (j.contains(key)) {
            if (!j[key].is_number()) throw data_error(std::string("turbine config: '") + key + "' must be a number");
            field = j[key].get<double>();
        }
    };
    get("rotor_diameter", spec.rotor_diameter);
    get("hub_height", spec.hub_height);
    get("anemometer_height", spec.anemometer_height);
    get("roughness_length", spec.roughness_length);
    get("air_density", spec.air_density);
    get("cut_in", spec.cut_in);
    get("rated_speed", spec.rated_speed);
    get("cut_out", spec.cut_out);
    get("rated_power", spec.rated_power);
    spec.cp = derive_cp(spec);
    spec.validate();
    return spec;
}

TurbineSpec turbine_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open turbine config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return turbine_from_json(ss.str());
}

std::string turbine_to_json(const TurbineSpec& spec) {
    nlohmann::ordered_json j;
    j["rotor_diameter"] = spec.rotor_diameter;
    j["hub_height"] = spec.hub_height;
    j["anemometer_height"] = spec.anemometer_height;
    j["roughness_length"] = spec.roughness_length;
    j["air_density"] = spec.air_density;
    j["cut_in"] = spec.cut_in;
    j["rated_speed"] = spec.rated_speed;
    j["cut_out"] = spec.cut_out;
    j["rated_power"] = spec.rated_power;
    j["cp"] = spec.cp;
    j["swept_area"] = spec.swept_area();
    j["hub_ratio"] = hub_ratio(spec);
    const SpeedBand band = speed_band_at_anemometer(spec);
    j["band_at_anemometer"] = {{"start", band.start}, {"rated", band.rated}, {"cutoff", band.cutoff}};
    return j.dump(2);
}

std::string ConversionStats::json(int precision) const {
    std::string out = "{\"fraction\":" + fmt_fixed(fraction, precision);
    out += ",\"all_zero\":";
    out += all_zero ? "true" : "false";
    out += ",\"band_time_fractions\":{";
    out += "\"below_cut_in\":" + fmt_fixed(band_time_fractions[0], precision);
    out += ",\"cubic\":" + fmt_fixed(band_time_fractions[1], precision);
    out += ",\"rated\":" + fmt_fixed(band_time_fractions[2], precision);
    out += ",\"above_cut_out\":" + fmt_fixed(band_time_fractions[3], precision);
    out += "},\"clipped_energy_w\":" + fmt_fixed(clipped_energy, precision);
    out += ",\"unclipped_energy_w\":" + fmt_fixed(unclipped_energy, precision);
    out += '}';
    return out;
}

} // namespace windfc::physics
