#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace inductlab::csv {

/// Splits one CSV record. Supports RFC-4180 double-quote escaping; no
/// embedded newlines (every record in our formats is a single line).
std::vector<std::string> split_record(std::string_view line);

/// Quotes a field if it contains a comma, quote, or newline.
std::string escape_field(std::string_view field);

std::string join_record(const std::vector<std::string>& fields);

struct Table {
    std::vector<std::string> comments; // leading '#' lines, kept verbatim
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Reads a CSV file with optional leading '#' comment lines and a header row.
/// Throws Error("IoFailure") when the file cannot be opened and
/// Error("MalformedRow") on column-count mismatches.
Table read_file(const std::string& path);

/// Renders a double so a read-back parses to the identical value.
std::string format_double(double v);

} // namespace inductlab::csv
