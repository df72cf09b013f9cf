#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace windfc {

// Timestamps are UTC minutes since the Unix epoch; the buoy cadence is
// minute-resolution so nothing finer is ever needed.
using minute_t = std::int64_t;

enum class FieldFlag : std::uint8_t { observed = 0, imputed = 1, missing = 2 };

std::string_view flag_name(FieldFlag f);
FieldFlag flag_from_name(std::string_view name);

minute_t minutes_from_civil(int year, int month, int day, int hour, int minute);
std::string format_timestamp(minute_t t);
// Accepts "YYYY-MM-DDTHH:MM[:SS]" and "YYYY-MM-DD HH:MM[:SS]".
minute_t parse_timestamp(std::string_view text);

// --- deterministic number formatting -------------------------------------

// Shortest decimal form that parses back to the identical double.
std::string fmt_shortest(double v);
// Fixed decimal form used by report emitters (no locale, no exponent).
std::string fmt_fixed(double v, int precision);

// --- seeding and portable random draws ------------------------------------

// FNV-1a, used to derive sub-seeds from a master seed plus a context label.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 14695981039346656037ull);
std::uint64_t derive_seed(std::uint64_t master, std::string_view context);

// The engine is std::mt19937_64 (bit-exact sequence by the standard); the
// transforms below avoid the implementation-defined std distributions.
std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t n); // [0, n)
double uniform01(std::mt19937_64& rng);                  // [0, 1)
double uniform_range(std::mt19937_64& rng, double lo, double hi);
double normal01(std::mt19937_64& rng);                   // Box-Muller, two draws per call
double weibull_draw(std::mt19937_64& rng, double shape, double scale);
double weibull_from_u(double u, double shape, double scale); // inverse CDF
double normal_cdf(double x);

// --- CSV helpers (RFC 4180 quoting) ---------------------------------------

std::string csv_escape(std::string_view field);
std::string csv_join(const std::vector<std::string>& fields);
std::vector<std::string> csv_split(std::string_view line);

} // namespace windfc
