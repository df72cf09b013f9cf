#include "windfc/ingest.hpp"

#include "windfc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace windfc::ingest {

namespace {

// NDBC missing-value sentinels by column (99/999/9999 family, width-dependent).
constexpr std::array<double, kFieldCount> kSentinels = {999.0, 99.0, 99.0, 9999.0,
                                                        999.0, 999.0, 999.0};

bool parse_double(std::string_view tok, double& out) {
    const char* begin = tok.data();
    const char* end = tok.data() + tok.size();
    auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc() && res.ptr == end;
}

bool parse_int(std::string_view tok, int& out) {
    const char* begin = tok.data();
    const char* end = tok.data() + tok.size();
    auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc() && res.ptr == end;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

// Sets one met field from a token, applying the sentinel convention.
void assign_field(MetRecord& rec, int field, std::string_view tok, std::size_t line_no) {
    if (tok.empty() || tok == "MM") {
        rec.flags[field] = FieldFlag::missing;
        return;
    }
    double v;
    if (!parse_double(tok, v)) {
        throw data_error("line " + std::to_string(line_no) + ": bad numeric value '" +
                         std::string(tok) + "' for " + kFieldNames[field]);
    }
    if (v == kSentinels[field]) {
        rec.flags[field] = FieldFlag::missing;
        return;
    }
    if (field == 0) {
        // WDIR convention: 360 means north; store in [0, 360)
        if (v == 360.0) v = 0.0;
        if (v < 0.0 || v >= 360.0) {
            throw data_error("line " + std::to_string(line_no) + ": WDIR " +
                             std::string(tok) + " outside [0, 360)");
        }
    }
    if ((field == 1 || field == 2) && v < 0.0) {
        throw data_error("line " + std::to_string(line_no) + ": negative speed for " +
                         std::string(kFieldNames[field]));
    }
    rec.values[field] = v;
    rec.flags[field] = FieldFlag::observed;
}

struct ColumnMap {
    // indices into the token vector; -1 when absent
    int year = -1, month = -1, day = -1, hour = -1, minute = -1;
    int timestamp = -1;
    std::array<int, kFieldCount> fields;
    std::array<int, kFieldCount> flag_cols;
    ColumnMap() {
        fields.fill(-1);
        flag_cols.fill(-1);
    }
    bool has_time() const {
        return timestamp >= 0 || (year >= 0 && month >= 0 && day >= 0 && hour >= 0 && minute >= 0);
    }
};

ColumnMap map_columns(const std::vector<std::string>& names) {
    ColumnMap map;
    for (std::size_t i = 0; i < names.size(); ++i) {
        std::string n = names[i];
        std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::toupper(c); });
        const int idx = static_cast<int>(i);
        if (n == "YY" || n == "YYYY" || n == "#YY") map.year = idx;
        else if (n == "MM" && map.month < 0 && map.year >= 0) map.month = idx;
        else if (n == "DD") map.day = idx;
        else if (n == "HH") map.hour = idx;
        else if (n == "MN" || n == "MM2" || (n == "MM" && map.month >= 0)) map.minute = idx;
        else if (n == "TIMESTAMP" || n == "TIME" || n == "DATETIME") map.timestamp = idx;
        else {
            bool is_flag = false;
            std::string base = n;
            if (n.size() > 5 && n.substr(n.size() - 5) == "_FLAG") {
                base = n.substr(0, n.size() - 5);
                is_flag = true;
            }
            int f = field_index(base);
            if (f >= 0) {
                (is_flag ? map.flag_cols[f] : map.fields[f]) = idx;
            }
            // unknown columns (WVHT, DPD, ...) are ignored
        }
    }
    return map;
}

minute_t time_from_tokens(const ColumnMap& map, const std::vector<std::string>& toks,
                          std::size_t line_no) {
    if (map.timestamp >= 0) {
        return parse_timestamp(toks[static_cast<std::size_t>(map.timestamp)]);
    }
    int y, mo, d, h, mi;
    if (!parse_int(toks[map.year], y) || !parse_int(toks[map.month], mo) ||
        !parse_int(toks[map.day], d) || !parse_int(toks[map.hour], h) ||
        !parse_int(toks[map.minute], mi)) {
        throw data_error("line " + std::to_string(line_no) + ": bad date fields");
    }
    if (y < 100) y += 1900; // two-digit years in old NDBC files
    return minutes_from_civil(y, mo, d, h, mi);
}

std::vector<MetRecord> parse_rows(const ColumnMap& map,
                                  const std::vector<std::vector<std::string>>& rows,
                                  const std::vector<std::size_t>& line_nos) {
    std::vector<MetRecord> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& toks = rows[r];
        const std::size_t line_no = line_nos[r];
        std::size_t needed = 0;
        auto check = [&](int idx) {
            if (idx >= 0) needed = std::max(needed, static_cast<std::size_t>(idx) + 1);
        };
        check(map.timestamp);
        check(map.year); check(map.month); check(map.day); check(map.hour); check(map.minute);
        for (int f = 0; f < kFieldCount; ++f) { check(map.fields[f]); check(map.flag_cols[f]); }
        if (toks.size() < needed) {
            throw data_error("line " + std::to_string(line_no) + ": expected at least " +
                             std::to_string(needed) + " columns, got " + std::to_string(toks.size()));
        }
        MetRecord rec;
        rec.timestamp = time_from_tokens(map, toks, line_no);
        for (int f = 0; f < kFieldCount; ++f) {
            if (map.fields[f] >= 0) {
                assign_field(rec, f, toks[static_cast<std::size_t>(map.fields[f])], line_no);
            }
            if (map.flag_cols[f] >= 0) {
                const auto& tok = toks[static_cast<std::size_t>(map.flag_cols[f])];
                if (!tok.empty()) {
                    FieldFlag flag = flag_from_name(tok);
                    if (flag == FieldFlag::missing) rec.flags[f] = FieldFlag::missing;
                    else if (rec.flags[f] != FieldFlag::missing) rec.flags[f] = flag;
                }
            }
        }
        out.push_back(rec);
    }
    return out;
}

} // namespace

int field_index(std::string_view name) {
    for (int i = 0; i < kFieldCount; ++i) {
        if (name == kFieldNames[i]) return i;
    }
    return -1;
}

std::vector<MetRecord> parse_ndbc(std::istream& in) {
    std::string line;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_nos;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (line[0] == '#') {
            if (header.empty()) {
                std::string stripped = line.substr(1);
                header = split_ws(stripped);
            }
            // the units line (#yr mo dy ...) and further comments are skipped
            continue;
        }
        rows.push_back(split_ws(line));
        line_nos.push_back(line_no);
    }
    if (rows.empty()) return {};
    if (header.empty()) {
        throw data_error("NDBC input has no '#'-prefixed header line");
    }
    ColumnMap map = map_columns(header);
    if (!map.has_time()) {
        throw data_error("NDBC header lacks YY MM DD hh mm time columns");
    }
    return parse_rows(map, rows, line_nos);
}

std::vector<MetRecord> parse_csv(std::istream& in) {
    std::string line;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_nos;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto toks = csv_split(line);
        if (header.empty()) {
            header = toks;
            continue;
        }
        rows.push_back(std::move(toks));
        line_nos.push_back(line_no);
    }
    if (header.empty() || rows.empty()) return {};
    ColumnMap map = map_columns(header);
    if (!map.has_time()) {
        throw data_error("CSV header needs a timestamp column or YY,MM,DD,hh,mm columns");
    }
    return parse_rows(map, rows, line_nos);
}

std::vector<MetRecord> parse_auto_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open input file '" + path + "'");
    // Peek at the first non-empty character to pick the format.
    int c;
    while ((c = in.peek()) != EOF && (c == '\n' || c == '\r' || c == ' ')) in.get();
    if (c == '#') return parse_ndbc(in);
    return parse_csv(in);
}

SeriesDataset repair(std::vector<MetRecord> raw, int cadence_minutes, std::string station_id) {
    if (cadence_minutes <= 0) throw usage_error("cadence must be positive");
    if (raw.size() < 2) throw data_error("insufficient data: need at least 2 records");

    std::stable_sort(raw.begin(), raw.end(),
                     [](const MetRecord& a, const MetRecord& b) { return a.timestamp < b.timestamp; });

    SeriesDataset ds;
    ds.station_id = std::move(station_id);
    ds.cadence_minutes = cadence_minutes;

    // Drop duplicate timestamps, keeping the first occurrence.
    std::vector<MetRecord> unique;
    unique.reserve(raw.size());
    for (const auto& rec : raw) {
        if (!unique.empty() && rec.timestamp == unique.back().timestamp) {
            ds.repair_log.push_back({RepairEvent::Kind::duplicate_dropped, rec.timestamp, -1,
                                     RepairEvent::Method::none});
            continue;
        }
        unique.push_back(rec);
    }
    if (unique.size() < 2) throw data_error("insufficient data: need at least 2 distinct timestamps");

    const minute_t first = unique.front().timestamp;
    const minute_t last = unique.back().timestamp;
    for (const auto& rec : unique) {
        if ((rec.timestamp - first) % cadence_minutes != 0) {
            throw data_error("timestamp " + format_timestamp(rec.timestamp) +
                             " is not on the " + std::to_string(cadence_minutes) +
                             "-minute cadence grid");
        }
    }

    const std::size_t slots = static_cast<std::size_t>((last - first) / cadence_minutes) + 1;
    ds.records.resize(slots);
    std::vector<bool> inserted(slots, true);
    for (std::size_t i = 0; i < slots; ++i) {
        ds.records[i].timestamp = first + static_cast<minute_t>(i) * cadence_minutes;
    }
    for (const auto& rec : unique) {
        const std::size_t i = static_cast<std::size_t>((rec.timestamp - first) / cadence_minutes);
        ds.records[i] = rec;
        inserted[i] = false;
    }
    for (std::size_t i = 0; i < slots; ++i) {
        if (inserted[i]) {
            ds.repair_log.push_back({RepairEvent::Kind::row_inserted, ds.records[i].timestamp, -1,
                                     RepairEvent::Method::none});
        }
    }

    // Fill missing runs per field: linear interpolation for short bracketed
    // gaps, forward fill for long ones, nearest fill at the series edges.
    constexpr std::size_t kMaxInterpGap = 6;
    for (int f = 0; f < kFieldCount; ++f) {
        std::size_t i = 0;
        while (i < slots) {
            if (ds.records[i].flags[f] != FieldFlag::missing) {
                ++i;
                continue;
            }
            std::size_t run_end = i;
            while (run_end < slots && ds.records[run_end].flags[f] == FieldFlag::missing) ++run_end;
            const bool has_left = i > 0;
            const bool has_right = run_end < slots;
            const std::size_t run_len = run_end - i;

            if (!has_left && !has_right) break; // field entirely missing: leave flagged

            RepairEvent::Method method;
            if (has_left && has_right && run_len <= kMaxInterpGap) {
                method = RepairEvent::Method::linear;
                const double v0 = ds.records[i - 1].values[f];
                const double v1 = ds.records[run_end].values[f];
                const double span = static_cast<double>(run_len + 1);
                for (std::size_t k = 0; k < run_len; ++k) {
                    const double w = static_cast<double>(k + 1) / span;
                    ds.records[i + k].values[f] = v0 + (v1 - v0) * w;
                }
            } else if (has_left) {
                method = RepairEvent::Method::forward_fill;
                const double v0 = ds.records[i - 1].values[f];
                for (std::size_t k = 0; k < run_len; ++k) ds.records[i + k].values[f] = v0;
            } else {
                method = RepairEvent::Method::back_fill;
                const double v1 = ds.records[run_end].values[f];
                for (std::size_t k = 0; k < run_len; ++k) ds.records[i + k].values[f] = v1;
            }
            for (std::size_t k = 0; k < run_len; ++k) {
                ds.records[i + k].flags[f] = FieldFlag::imputed;
                ds.repair_log.push_back({RepairEvent::Kind::value_imputed,
                                         ds.records[i + k].timestamp, f, method});
            }
            i = run_end;
        }
    }
    return ds;
}

double IngestSummary::row_imputed_fraction() const {
    return rows == 0 ? 0.0 : static_cast<double>(rows_inserted) / static_cast<double>(rows);
}

IngestSummary summarize(const SeriesDataset& ds) {
    IngestSummary s;
    s.rows = ds.records.size();
    if (!ds.records.empty()) {
        s.first = ds.records.front().timestamp;
        s.last = ds.records.back().timestamp;
    }
    for (const auto& rec : ds.records) {
        for (int f = 0; f < kFieldCount; ++f) {
            switch (rec.flags[f]) {
            case FieldFlag::observed: ++s.per_field[f].observed; break;
            case FieldFlag::imputed: ++s.per_field[f].imputed; break;
            case FieldFlag::missing: ++s.per_field[f].missing; break;
            }
        }
    }
    for (const auto& ev : ds.repair_log) {
        switch (ev.kind) {
        case RepairEvent::Kind::row_inserted: ++s.rows_inserted; break;
        case RepairEvent::Kind::value_imputed: ++s.values_imputed; break;
        case RepairEvent::Kind::duplicate_dropped: ++s.duplicates_dropped; break;
        }
    }
    return s;
}

std::string IngestSummary::json() const {
    std::string out = "{\"rows\":" + std::to_string(rows);
    out += ",\"rows_inserted\":" + std::to_string(rows_inserted);
    out += ",\"values_imputed\":" + std::to_string(values_imputed);
    out += ",\"duplicates_dropped\":" + std::to_string(duplicates_dropped);
    out += ",\"first\":\"" + format_timestamp(first) + "\"";
    out += ",\"last\":\"" + format_timestamp(last) + "\"";
    out += ",\"row_imputed_fraction\":" + fmt_shortest(row_imputed_fraction());
    out += ",\"fields\":{";
    for (int f = 0; f < kFieldCount; ++f) {
        if (f) out += ',';
        const auto& st = per_field[f];
        const double denom = rows == 0 ? 1.0 : static_cast<double>(rows);
        out += std::string("\"") + kFieldNames[f] + "\":{";
        out += "\"observed\":" + std::to_string(st.observed);
        out += ",\"imputed\":" + std::to_string(st.imputed);
        out += ",\"missing\":" + std::to_string(st.missing);
        out += ",\"imputed_fraction\":" + fmt_shortest(static_cast<double>(st.imputed) / denom);
        out += ",\"missing_fraction\":" + fmt_shortest(static_cast<double>(st.missing) / denom);
        out += '}';
    }
    out += "}}";
    return out;
}

void write_csv(const SeriesDataset& ds, std::ostream& out) {
    std::vector<std::string> header = {"timestamp"};
    for (int f = 0; f < kFieldCount; ++f) header.emplace_back(kFieldNames[f]);
    for (int f = 0; f < kFieldCount; ++f) header.emplace_back(std::string(kFieldNames[f]) + "_flag");
    out << csv_join(header) << '\n';
    std::vector<std::string> row;
    for (const auto& rec : ds.records) {
        row.clear();
        row.push_back(format_timestamp(rec.timestamp));
        for (int f = 0; f < kFieldCount; ++f) {
            row.push_back(rec.flags[f] == FieldFlag::missing ? "" : fmt_shortest(rec.values[f]));
        }
        for (int f = 0; f < kFieldCount; ++f) {
            row.emplace_back(flag_name(rec.flags[f]));
        }
        out << csv_join(row) << '\n';
    }
}

void write_repair_log_jsonl(const SeriesDataset& ds, std::ostream& out) {
    for (const auto& ev : ds.repair_log) {
        out << "{\"type\":\"";
        switch (ev.kind) {
        case RepairEvent::Kind::row_inserted: out << "row_inserted"; break;
        case RepairEvent::Kind::value_imputed: out << "value_imputed"; break;
        case RepairEvent::Kind::duplicate_dropped: out << "duplicate_dropped"; break;
        }
        out << "\",\"timestamp\":\"" << format_timestamp(ev.timestamp) << "\"";
        if (ev.field >= 0) {
            out << ",\"field\":\"" << kFieldNames[ev.field] << "\",\"method\":\"";
            switch (ev.method) {
            case RepairEvent::Method::linear: out << "linear"; break;
            case RepairEvent::Method::forward_fill: out << "forward_fill"; break;
            case RepairEvent::Method::back_fill: out << "back_fill"; break;
            case RepairEvent::Method::none: out << "none"; break;
            }
            out << "\"";
        }
        out << "}\n";
    }
}

} // namespace windfc::ingest
