#ifndef HISTMATCH_CSV_HPP
#define HISTMATCH_CSV_HPP

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "histmatch/error.hpp"

namespace histmatch {

/// Shortest decimal representation that round-trips the exact double.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace csv {

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

struct Row {
    std::size_t line_no = 0; // 1-based line in the file
    std::vector<std::string> fields;
};

/// Read a whole CSV file. The first line must equal `header` exactly;
/// every following non-empty line must have the same number of fields.
/// No quoting: fields must not contain commas.
inline std::vector<Row> read_file(const std::filesystem::path& path, const std::string& header) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line))
        throw ParseError(path.string() + ": missing header line");
    ++line_no;
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != header)
        throw ParseError(path.string() + ":1: expected header '" + header + "', got '" + line + "'");
    const std::size_t want = split(header).size();
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        Row row;
        row.line_no = line_no;
        row.fields = split(line);
        if (row.fields.size() != want)
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(want) + " fields, got " +
                             std::to_string(row.fields.size()));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace csv
} // namespace histmatch

#endif // HISTMATCH_CSV_HPP
