#pragma once

#include <optional>
#include <string>
#include <vector>

namespace iontrap {

// Line-based "key = value" file with [section] headers and '#' comments.
// Keys within a section keep file order; duplicate keys are allowed (used for
// schedule events). Numbers accept the usual decimal/exponent forms.
struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct ConfigSection {
    std::string name;
    int line = 0;
    std::vector<ConfigEntry> entries;

    const ConfigEntry* find(const std::string& key) const;
    bool has(const std::string& key) const { return find(key) != nullptr; }

    // typed getters; throw ConfigError mentioning the line on bad values
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key) const;
    long get_long(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
};

struct ConfigError : std::exception {
    std::string message;
    int line = 0;
    explicit ConfigError(std::string msg, int l = 0);
    const char* what() const noexcept override { return message.c_str(); }
};

struct ConfigFile {
    std::string path;
    std::vector<ConfigSection> sections;

    const ConfigSection* find(const std::string& name) const;
    const ConfigSection& require(const std::string& name) const;  // throws ConfigError
    std::vector<const ConfigSection*> with_prefix(const std::string& prefix) const;

    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text, const std::string& path = "<string>");
};

double parse_double(const std::string& text, int line);  // throws ConfigError

}  // namespace iontrap
