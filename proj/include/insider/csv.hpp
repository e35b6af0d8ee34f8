#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace insider {

// Shortest round-trip decimal (at most 17 significant digits), locale-free.
std::string format_double(double x);

// RFC-4180 quoting when the field contains a comma, quote or newline.
std::string csv_field(std::string_view s);

class CsvWriter {
public:
    CsvWriter(std::ostream& os, std::vector<std::string> header);

    template <class... Ts>
    void row(const Ts&... fields) {
        std::vector<std::string> cells{cell(fields)...};
        write(cells);
    }
    void write(const std::vector<std::string>& cells);

    std::size_t columns() const { return header_.size(); }

private:
    static std::string cell(double x) { return format_double(x); }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(long x) { return std::to_string(x); }
    static std::string cell(long long x) { return std::to_string(x); }
    static std::string cell(unsigned long x) { return std::to_string(x); }
    static std::string cell(unsigned long long x) { return std::to_string(x); }
    static std::string cell(const std::string& s) { return csv_field(s); }
    static std::string cell(const char* s) { return csv_field(s); }

    std::ostream& os_;
    std::vector<std::string> header_;
};

// In-memory table, written in one go; used for figure and report outputs.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    void write(std::ostream& os) const;
    std::size_t column(std::string_view name) const;
};

} // namespace insider
