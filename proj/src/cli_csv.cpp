#include <array>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "liepnm/cli.hpp"
#include "liepnm/error.hpp"

namespace liepnm::cli {

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw Error("cannot format number");
    return std::string(buf.data(), ptr);
}

std::ptrdiff_t Table::find(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<std::ptrdiff_t>(i);
    return -1;
}

void write_csv(std::ostream& out, const Table& table) {
    if (table.header.size() != table.columns.size()) throw Error("csv: header and column counts differ");
    const std::size_t rows = table.rows();
    for (const auto& c : table.columns)
        if (c.size() != rows) throw Error("csv: columns have different lengths");

    for (std::size_t j = 0; j < table.header.size(); ++j) out << (j ? "," : "") << table.header[j];
    out << '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < table.columns.size(); ++j) out << (j ? "," : "") << format_double(table.columns[j][i]);
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const Table& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    write_csv(out, table);
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

Table read_csv(std::istream& in) {
    Table t;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line);
        if (!have_header) {
            t.header = cells;
            t.columns.assign(cells.size(), {});
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size())
            throw ConfigError("csv line " + std::to_string(line_no) + ": expected " +
                              std::to_string(t.header.size()) + " fields, got " + std::to_string(cells.size()));
        for (std::size_t j = 0; j < cells.size(); ++j) {
            double v = 0.0;
            const char* first = cells[j].data();
            const char* last = first + cells[j].size();
            const auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc() || ptr != last)
                throw ConfigError("csv line " + std::to_string(line_no) + ": '" + cells[j] + "' is not a number");
            t.columns[j].push_back(v);
        }
    }
    if (!have_header) throw ConfigError("csv is empty");
    return t;
}

Table read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path.string() + "'");
    return read_csv(in);
}

}  // namespace liepnm::cli
