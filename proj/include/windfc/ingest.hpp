#pragma once

#include "windfc/common.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace windfc::ingest {

// The met fields carried through the pipeline, in canonical column order.
constexpr std::array<const char*, 7> kFieldNames = {"WDIR", "WSPD", "GST", "PRES",
                                                    "ATMP", "WTMP", "DEWP"};
constexpr int kFieldCount = 7;
int field_index(std::string_view name); // -1 if unknown

// One 10-minute buoy observation. Field values are meaningless when the
// matching flag is `missing`.
struct MetRecord {
    minute_t timestamp = 0;
    std::array<double, kFieldCount> values{};
    std::array<FieldFlag, kFieldCount> flags{FieldFlag::missing, FieldFlag::missing,
                                             FieldFlag::missing, FieldFlag::missing,
                                             FieldFlag::missing, FieldFlag::missing,
                                             FieldFlag::missing};

    double wdir() const { return values[0]; }
    double wspd() const { return values[1]; }
    double gst() const { return values[2]; }
    double pres() const { return values[3]; }
    double atmp() const { return values[4]; }
    double wtmp() const { return values[5]; }
    double dewp() const { return values[6]; }
};

struct RepairEvent {
    enum class Kind { row_inserted, value_imputed, duplicate_dropped };
    enum class Method { none, linear, forward_fill, back_fill };
    Kind kind;
    minute_t timestamp;
    int field = -1; // -1 for whole-row events
    Method method = Method::none;
};

// A cadence-complete series: strictly increasing timestamps with constant
// spacing, every hole filled and logged.
struct SeriesDataset {
    std::string station_id;
    int cadence_minutes = 10;
    std::vector<MetRecord> records;
    std::vector<RepairEvent> repair_log;
};

// Parsers produce raw records; `repair` turns them into a SeriesDataset.
std::vector<MetRecord> parse_ndbc(std::istream& in);
std::vector<MetRecord> parse_csv(std::istream& in);
// Dispatches on content: '#' header -> NDBC text, otherwise named-column CSV.
std::vector<MetRecord> parse_auto_file(const std::string& path);

SeriesDataset repair(std::vector<MetRecord> raw, int cadence_minutes = 10,
                     std::string station_id = "");

struct FieldStats {
    std::size_t observed = 0;
    std::size_t imputed = 0;
    std::size_t missing = 0;
};

struct IngestSummary {
    std::size_t rows = 0;
    std::size_t rows_inserted = 0;
    std::size_t values_imputed = 0;
    std::size_t duplicates_dropped = 0;
    minute_t first = 0;
    minute_t last = 0;
    std::array<FieldStats, kFieldCount> per_field{};
    double row_imputed_fraction() const;
    std::string json() const;
};

IngestSummary summarize(const SeriesDataset& ds);

void write_csv(const SeriesDataset& ds, std::ostream& out);
void write_repair_log_jsonl(const SeriesDataset& ds, std::ostream& out);

} // namespace windfc::ingest
