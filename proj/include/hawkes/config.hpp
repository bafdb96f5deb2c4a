#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hawkes {

/// Malformed or missing configuration; the message starts with `origin:line` or `origin [section]`.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One `[name]` block of key = value pairs.
class ConfigSection {
public:
    ConfigSection() = default;
    ConfigSection(std::string name, std::string origin) : name_(std::move(name)), origin_(std::move(origin)) {}

    void set(const std::string& key, const std::string& value, int line);

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] bool has(const std::string& key) const;

    [[nodiscard]] std::string get_string(const std::string& key) const;
    [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const;
    [[nodiscard]] double get_double(const std::string& key) const;
    [[nodiscard]] double get_double(const std::string& key, double fallback) const;
    [[nodiscard]] std::uint64_t get_uint(const std::string& key) const;
    [[nodiscard]] std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;
    /// Comma-separated list; an empty value gives an empty list.
    [[nodiscard]] std::vector<double> get_doubles(const std::string& key) const;
    [[nodiscard]] std::vector<std::size_t> get_sizes(const std::string& key) const;
    [[nodiscard]] std::vector<std::string> get_strings(const std::string& key) const;

    [[nodiscard]] std::vector<std::string> keys() const;

    /// `origin [name] key (line n)` for error messages.
    [[nodiscard]] std::string where(const std::string& key) const;

private:
    struct Entry {
        std::string value;
        int line = 0;
    };
    const Entry& entry(const std::string& key) const;

    std::string name_;
    std::string origin_;
    std::map<std::string, Entry> entries_;
};

/// INI-style text: `[section]` headers (dots allowed, e.g. `[kernels.phi2]`), `key = value` lines,
/// `#` or `;` comments. Keys before the first header belong to the section "run".
class Config {
public:
    static Config parse(const std::string& text, const std::string& origin);
    static Config load(const std::string& path);

    [[nodiscard]] const std::string& origin() const { return origin_; }
    /// Directory of the config file; relative file references resolve against it.
    [[nodiscard]] const std::string& base_dir() const { return base_dir_; }
    [[nodiscard]] bool has(const std::string& section) const { return sections_.count(section) != 0; }
    /// Throws ConfigError naming the missing block.
    [[nodiscard]] const ConfigSection& section(const std::string& name) const;
    /// Empty section when absent.
    [[nodiscard]] const ConfigSection& section_or_empty(const std::string& name) const;
    [[nodiscard]] std::vector<std::string> section_names() const;

private:
    std::string origin_;
    std::string base_dir_;
    std::map<std::string, ConfigSection> sections_;
    ConfigSection empty_;
};

}  // namespace hawkes
