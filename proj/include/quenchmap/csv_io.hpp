#pragma once

#include <string>
#include <vector>

namespace quenchmap {

/// Raw CSV contents: header row plus string cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// RFC 4180 reader: quoted fields, doubled quotes, CRLF, embedded newlines
/// inside quotes. The first record is taken as the header.
CsvTable read_csv(const std::string& path);

/// Writer quotes fields only when they contain a comma, quote or newline.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Parse a full string as a double; returns false for empty/partial/garbage.
bool parse_double(const std::string& s, double& out);

/// Fixed round-trippable formatting used everywhere a double lands in a file.
std::string format_double(double v);

} // namespace quenchmap
