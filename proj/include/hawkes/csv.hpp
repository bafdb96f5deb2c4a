#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace hawkes::csv {

/// Shortest decimal that round-trips to the same double; "nan"/"inf"/"-inf" otherwise.
std::string number(double value);

/// RFC 4180 quoting: fields containing a comma, quote or newline are quoted.
std::string field(const std::string& raw);

void write_row(std::ostream& os, std::span<const std::string> fields);
void write_row(std::ostream& os, std::initializer_list<std::string> fields);

/// `# key = value` metadata line.
void write_meta(std::ostream& os, const std::string& key, const std::string& value);

/// Parses a plain two-or-more column numeric CSV, skipping '#' lines and a non-numeric header.
std::vector<std::vector<double>> read_numeric(const std::string& path);

}  // namespace hawkes::csv
