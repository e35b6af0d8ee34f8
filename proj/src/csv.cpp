#include "insider/csv.hpp"

#include "insider/error.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace insider {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    // Shortest of %.15g / %.16g / %.17g that round-trips.
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

CsvWriter::CsvWriter(std::ostream& os, std::vector<std::string> header)
    : os_(os), header_(std::move(header)) {
    std::vector<std::string> cells;
    for (const auto& h : header_) cells.push_back(csv_field(h));
    write(cells);
}

void CsvWriter::write(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size())
        fail(ErrorKind::Io, "csv_width", "CSV row width does not match header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os_ << ',';
        os_ << cells[i];
    }
    os_ << '\n';
}

void Table::write(std::ostream& os) const {
    CsvWriter csv(os, header);
    for (const auto& r : rows) {
        std::vector<std::string> cells;
        for (double x : r) cells.push_back(format_double(x));
        csv.write(cells);
    }
}

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    fail(ErrorKind::Domain, "unknown_column", "no column named " + std::string(name));
}

} // namespace insider
