#include "hawkes/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hawkes {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    if (trim(value).empty()) return out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

bool parse_double(const std::string& text, double& out) {
    const std::string t = trim(text);
    if (t == "inf" || t == "+inf") {
        out = std::numeric_limits<double>::infinity();
        return true;
    }
    const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
    return res.ec == std::errc() && res.ptr == t.data() + t.size() && !t.empty();
}

bool parse_uint(const std::string& text, std::uint64_t& out) {
    const std::string t = trim(text);
    const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
    return res.ec == std::errc() && res.ptr == t.data() + t.size() && !t.empty();
}

}  // namespace

void ConfigSection::set(const std::string& key, const std::string& value, int line) {
    if (entries_.count(key))
        throw ConfigError(origin_ + ":" + std::to_string(line) + ": duplicate key '" + key + "' in [" + name_ + "]");
    entries_[key] = {value, line};
}

bool ConfigSection::has(const std::string& key) const { return entries_.count(key) != 0; }

std::string ConfigSection::where(const std::string& key) const {
    const auto it = entries_.find(key);
    std::string w = origin_ + " [" + name_ + "] " + key;
    if (it != entries_.end()) w += " (line " + std::to_string(it->second.line) + ")";
    return w;
}

const ConfigSection::Entry& ConfigSection::entry(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(origin_ + " [" + name_ + "]: missing key '" + key + "'");
    return it->second;
}

std::string ConfigSection::get_string(const std::string& key) const { return entry(key).value; }

std::string ConfigSection::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double ConfigSection::get_double(const std::string& key) const {
    double v = 0.0;
    if (!parse_double(entry(key).value, v)) throw ConfigError(where(key) + ": expected a number, got '" + entry(key).value + "'");
    return v;
}

double ConfigSection::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::uint64_t ConfigSection::get_uint(const std::string& key) const {
    std::uint64_t v = 0;
    if (!parse_uint(entry(key).value, v))
        throw ConfigError(where(key) + ": expected a nonnegative integer, got '" + entry(key).value + "'");
    return v;
}

std::uint64_t ConfigSection::get_uint(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_uint(key) : fallback;
}

bool ConfigSection::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = trim(entry(key).value);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError(where(key) + ": expected true or false, got '" + v + "'");
}

std::vector<double> ConfigSection::get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split_list(entry(key).value)) {
        double v = 0.0;
        if (!parse_double(item, v)) throw ConfigError(where(key) + ": '" + item + "' is not a number");
        out.push_back(v);
    }
    return out;
}

std::vector<std::size_t> ConfigSection::get_sizes(const std::string& key) const {
    std::vector<std::size_t> out;
    for (const auto& item : split_list(entry(key).value)) {
        std::uint64_t v = 0;
        if (!parse_uint(item, v)) throw ConfigError(where(key) + ": '" + item + "' is not a nonnegative integer");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

std::vector<std::string> ConfigSection::get_strings(const std::string& key) const {
    return split_list(entry(key).value);
}

std::vector<std::string> ConfigSection::keys() const {
    std::vector<std::string> out;
    for (const auto& [key, e] : entries_) out.push_back(key);
    return out;
}

Config Config::parse(const std::string& text, const std::string& origin) {
    Config c;
    c.origin_ = origin;
    c.empty_ = ConfigSection("", origin);
    std::string current = "run";
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(origin + ":" + std::to_string(line) + ": unterminated section header");
            current = trim(s.substr(1, s.size() - 2));
            if (current.empty()) throw ConfigError(origin + ":" + std::to_string(line) + ": empty section name");
            if (c.sections_.count(current))
                throw ConfigError(origin + ":" + std::to_string(line) + ": duplicate section [" + current + "]");
            c.sections_.emplace(current, ConfigSection(current, origin));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(origin + ":" + std::to_string(line) + ": expected key = value");
        const std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        const auto hash = value.find(" #");
        if (hash != std::string::npos) value = trim(value.substr(0, hash));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(line) + ": empty key");
        auto it = c.sections_.find(current);
        if (it == c.sections_.end()) it = c.sections_.emplace(current, ConfigSection(current, origin)).first;
        it->second.set(key, value, line);
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    Config c = parse(buf.str(), path);
    c.base_dir_ = std::filesystem::path(path).parent_path().string();
    return c;
}

const ConfigSection& Config::section(const std::string& name) const {
    const auto it = sections_.find(name);
    if (it == sections_.end()) throw ConfigError(origin_ + ": missing [" + name + "] block");
    return it->second;
}

const ConfigSection& Config::section_or_empty(const std::string& name) const {
    const auto it = sections_.find(name);
    return it == sections_.end() ? empty_ : it->second;
}

std::vector<std::string> Config::section_names() const {
    std::vector<std::string> out;
    for (const auto& [name, s] : sections_) out.push_back(name);
    return out;
}

}  // namespace hawkes
