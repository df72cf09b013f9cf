#include "windfc/common.hpp"
#include "windfc/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>

namespace windfc {

std::string_view flag_name(FieldFlag f) {
    switch (f) {
    case FieldFlag::observed: return "observed";
    case FieldFlag::imputed: return "imputed";
    case FieldFlag::missing: return "missing";
    }
    return "missing";
}

FieldFlag flag_from_name(std::string_view name) {
    if (name == "observed") return FieldFlag::observed;
    if (name == "imputed") return FieldFlag::imputed;
    if (name == "missing") return FieldFlag::missing;
    throw data_error("unknown field flag '" + std::string(name) + "'");
}

// Days since 1970-01-01 for a proleptic Gregorian civil date.
static std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

static void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

minute_t minutes_from_civil(int year, int month, int day, int hour, int minute) {
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour < 0 || hour > 23 ||
        minute < 0 || minute > 59) {
        throw data_error("invalid civil time");
    }
    return days_from_civil(year, month, day) * 1440 + hour * 60 + minute;
}

std::string format_timestamp(minute_t t) {
    std::int64_t days = t / 1440;
    std::int64_t rem = t % 1440;
    if (rem < 0) {
        rem += 1440;
        days -= 1;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d", y, m, d,
                  static_cast<int>(rem / 60), static_cast<int>(rem % 60));
    return buf;
}

minute_t parse_timestamp(std::string_view text) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    char sep = 0;
    int n = std::sscanf(std::string(text).c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep,
                        &h, &mi, &s);
    if (n < 6 || (sep != 'T' && sep != ' ')) {
        throw data_error("unparseable timestamp '" + std::string(text) + "'");
    }
    return minutes_from_civil(y, mo, d, h, mi);
}

std::string fmt_shortest(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt_fixed(double v, int precision) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
    std::uint64_t h = basis;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view context) {
    char master_bytes[8];
    std::memcpy(master_bytes, &master, 8);
    std::uint64_t h = fnv1a64(std::string_view(master_bytes, 8));
    return fnv1a64(context, h);
}

std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t n) {
    // rejection sampling: unbiased and reproducible across standard libraries
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % n;
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_range(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

double normal01(std::mt19937_64& rng) {
    // Box-Muller without caching the spare so the draw count per call is fixed.
    double u1 = uniform01(rng);
    double u2 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double weibull_from_u(double u, double shape, double scale) {
    if (u < 0.0) u = 0.0;
    if (u >= 1.0) u = std::nextafter(1.0, 0.0);
    return scale * std::pow(-std::log1p(-u), 1.0 / shape);
}

double weibull_draw(std::mt19937_64& rng, double shape, double scale) {
    return weibull_from_u(uniform01(rng), shape, scale);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

std::string csv_escape(std::string_view field) {
    bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(fields[i]);
    }
    return out;
}

std::vector<std::string> csv_split(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c == '\r') {
            // tolerate CRLF
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace windfc
