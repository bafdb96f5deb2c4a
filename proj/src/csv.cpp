#include "hawkes/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hawkes::csv {

std::string number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string field(const std::string& raw) {
    if (raw.find_first_of(",\"\n\r") == std::string::npos) return raw;
    std::string out = "\"";
    for (char c : raw) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_row(std::ostream& os, std::span<const std::string> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << field(fields[i]);
    }
    os << '\n';
}

void write_row(std::ostream& os, std::initializer_list<std::string> fields) {
    write_row(os, std::span<const std::string>(fields.begin(), fields.size()));
}

void write_meta(std::ostream& os, const std::string& key, const std::string& value) {
    os << "# " << key << " = " << value << '\n';
}

std::vector<std::vector<double>> read_numeric(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t");
            const auto e = cell.find_last_not_of(" \t");
            const std::string trimmed = b == std::string::npos ? "" : cell.substr(b, e - b + 1);
            double v = 0.0;
            const auto res = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), v);
            if (res.ec != std::errc() || res.ptr != trimmed.data() + trimmed.size()) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;
            }
            throw std::runtime_error(path + ": non-numeric row '" + line + "'");
        }
        first = false;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace hawkes::csv
