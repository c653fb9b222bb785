#include "quenchmap/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace quenchmap {

static std::vector<std::vector<std::string>> parse_records(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    std::size_t i = 0;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
    };
    auto end_record = [&] {
        end_field();
        // skip blank lines (a record that is one empty field)
        if (record.size() != 1 || !record[0].empty()) records.push_back(std::move(record));
        record.clear();
    };

    while (i < text.size()) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                } else {
                    in_quotes = false;
                    ++i;
                }
            } else {
                field += c;
                ++i;
            }
            continue;
        }
        switch (c) {
            case '"': in_quotes = true; ++i; break;
            case ',': end_field(); ++i; break;
            case '\r':
                end_record();
                i += (i + 1 < text.size() && text[i + 1] == '\n') ? 2 : 1;
                break;
            case '\n': end_record(); ++i; break;
            default: field += c; ++i; break;
        }
    }
    if (in_quotes) throw std::runtime_error("csv: unterminated quoted field");
    if (!field.empty() || !record.empty()) end_record();
    return records;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("csv: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    auto records = parse_records(buf.str());
    if (records.empty()) throw std::runtime_error("csv: " + path + " has no header row");

    CsvTable table;
    table.header = std::move(records.front());
    table.rows.assign(std::make_move_iterator(records.begin() + 1),
                      std::make_move_iterator(records.end()));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (table.rows[r].size() != table.header.size())
            throw std::runtime_error("csv: " + path + " row " + std::to_string(r + 2) + " has " +
                                     std::to_string(table.rows[r].size()) + " fields, header has " +
                                     std::to_string(table.header.size()));
    }
    return table;
}

static void write_field(std::ostream& out, const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
        out << field;
        return;
    }
    out << '"';
    for (char c : field) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

static void write_record(std::ostream& out, const std::vector<std::string>& record) {
    for (std::size_t i = 0; i < record.size(); ++i) {
        if (i) out << ',';
        write_field(out, record[i]);
    }
    out << '\n';
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("csv: cannot write " + path);
    write_record(out, header);
    for (const auto& row : rows) write_record(out, row);
    if (!out) throw std::runtime_error("csv: write failed for " + path);
}

bool parse_double(const std::string& s, double& out) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return false;
    std::size_t b = s.find_last_not_of(" \t") + 1;
    const char* first = s.data() + a;
    const char* last = s.data() + b;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec; // 40 chars always suffice for shortest round-trip doubles
    return std::string(buf, ptr);
}

} // namespace quenchmap
