#pragma once

#include <string>
#include <vector>

namespace collapse {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index for a named header; -1 when absent.
    int column(const std::string& name) const;
};

// RFC-4180-style parsing: quoted fields, "" escapes, CRLF tolerated.
// Throws UsageError with a row number on malformed input.
CsvTable parse_csv(const std::string& text);

CsvTable read_csv_file(const std::string& path);

std::string csv_escape(const std::string& field);

// Numbers in CSV outputs carry 9 significant digits.
std::string format_number(double v);

}  // namespace collapse
