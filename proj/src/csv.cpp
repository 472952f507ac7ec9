#include "edcamap/sweep.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace edcamap {

namespace {

constexpr std::size_t kColumns = 19;

// Shortest representation that parses back to the same double.
std::string format_number(double value) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) {
        throw std::runtime_error("number formatting failed");
    }
    return std::string(buf, end);
}

std::string format_optional(const std::optional<double>& value) {
    return value ? format_number(*value) : std::string();
}

double parse_number(const std::string& cell) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = first + cell.size();
    if (cell == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw std::invalid_argument("malformed number in CSV: '" + cell + "'");
    }
    return value;
}

int parse_int(const std::string& cell) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw std::invalid_argument("malformed integer in CSV: '" + cell + "'");
    }
    return value;
}

std::optional<double> parse_optional(const std::string& cell) {
    if (cell.empty()) {
        return std::nullopt;
    }
    return parse_number(cell);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

} // namespace

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
    if (rows.empty()) {
        throw std::invalid_argument("no result rows to write");
    }
    out << kCsvSchemaLine << '\n' << kCsvHeader << '\n';
    for (const ResultRow& r : rows) {
        out << r.status << ',' << r.n_stations << ',' << r.layers << ',' << r.txop << ',' << format_number(r.rate)
            << ',' << format_optional(r.delta) << ',' << to_string(r.strategy) << ','
            << (r.mapping ? r.mapping->to_string() : std::string()) << ',' << format_optional(r.e_ul_model) << ','
            << format_optional(r.e_ul_oracle);
        for (std::size_t ac = 0; ac < kNumAcs; ++ac) {
            out << ',' << (r.p_drop ? format_number((*r.p_drop)[ac]) : std::string());
        }
        out << ',' << format_optional(r.sim_avg_ul);
        for (std::size_t ac = 0; ac < kNumAcs; ++ac) {
            out << ',' << (r.sim_throughput ? format_number((*r.sim_throughput)[ac]) : std::string());
        }
        out << '\n';
    }
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    if (rows.empty()) {
        throw std::invalid_argument("no result rows to write");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    write_csv(rows, out);
    out.flush();
    if (!out) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

std::vector<ResultRow> parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvSchemaLine) {
        throw std::invalid_argument("missing CSV schema line");
    }
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw std::invalid_argument("unexpected CSV header");
    }
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != kColumns) {
            throw std::invalid_argument("CSV row has " + std::to_string(cells.size()) + " columns");
        }
        ResultRow r;
        r.status = cells[0];
        r.n_stations = parse_int(cells[1]);
        r.layers = parse_int(cells[2]);
        r.txop = parse_int(cells[3]);
        r.rate = parse_number(cells[4]);
        r.delta = parse_optional(cells[5]);
        r.strategy = parse_strategy(cells[6]);
        if (!cells[7].empty()) {
            r.mapping = MappingVector::parse(cells[7]);
        }
        r.e_ul_model = parse_optional(cells[8]);
        r.e_ul_oracle = parse_optional(cells[9]);
        if (!cells[10].empty()) {
            PerAc<double> drops{};
            for (std::size_t ac = 0; ac < kNumAcs; ++ac) {
                drops[ac] = parse_number(cells[10 + ac]);
            }
            r.p_drop = drops;
        }
        r.sim_avg_ul = parse_optional(cells[14]);
        if (!cells[15].empty()) {
            PerAc<double> s{};
            for (std::size_t ac = 0; ac < kNumAcs; ++ac) {
                s[ac] = parse_number(cells[15 + ac]);
            }
            r.sim_throughput = s;
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace edcamap
