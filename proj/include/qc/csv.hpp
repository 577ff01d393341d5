#pragma once

#include <string>
#include <vector>

namespace qc {

// Numeric table with a header row.  Written as comma-separated values with
// '.' decimals, LF line endings and 17-significant-digit floats, so equal
// tables produce byte-identical files.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
};

// printf("%.17g") formatting.
std::string format_g17(double v);

std::string to_csv(const Table& table);

// Throws std::runtime_error mentioning the path on I/O failure.
void write_csv(const Table& table, const std::string& path);

void write_text_file(const std::string& text, const std::string& path);

} // namespace qc
