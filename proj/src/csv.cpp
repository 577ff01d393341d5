#include "qc/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qc {

void Table::add_row(std::vector<double> row) {
    if (row.size() != header.size())
        throw std::invalid_argument("Table: row width does not match header");
    rows.push_back(std::move(row));
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c)
            out += ',';
        out += table.header[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                out += ',';
            out += format_g17(row[c]);
        }
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    out.flush();
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

void write_csv(const Table& table, const std::string& path) {
    write_text_file(to_csv(table), path);
}

} // namespace qc
