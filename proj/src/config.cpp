#include "iontrap/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace iontrap {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

ConfigError::ConfigError(std::string msg, int l) : line(l) {
    if (l > 0)
        message = "line " + std::to_string(l) + ": " + std::move(msg);
    else
        message = std::move(msg);
}

double parse_double(const std::string& text, int line) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0')
        throw ConfigError("not a number: '" + t + "'", line);
    return v;
}

const ConfigEntry* ConfigSection::find(const std::string& key) const {
    for (const auto& e : entries)
        if (e.key == key) return &e;
    return nullptr;
}

std::string ConfigSection::get_string(const std::string& key) const {
    const ConfigEntry* e = find(key);
    if (!e) throw ConfigError("missing key '" + key + "' in [" + name + "]", line);
    return e->value;
}

std::string ConfigSection::get_string(const std::string& key, const std::string& fallback) const {
    const ConfigEntry* e = find(key);
    return e ? e->value : fallback;
}

double ConfigSection::get_double(const std::string& key) const {
    const ConfigEntry* e = find(key);
    if (!e) throw ConfigError("missing key '" + key + "' in [" + name + "]", line);
    return parse_double(e->value, e->line);
}

double ConfigSection::get_double(const std::string& key, double fallback) const {
    const ConfigEntry* e = find(key);
    return e ? parse_double(e->value, e->line) : fallback;
}

long ConfigSection::get_long(const std::string& key) const {
    const double v = get_double(key);
    return static_cast<long>(v >= 0 ? v + 0.5 : v - 0.5);
}

long ConfigSection::get_long(const std::string& key, long fallback) const {
    const ConfigEntry* e = find(key);
    if (!e) return fallback;
    const double v = parse_double(e->value, e->line);
    return static_cast<long>(v >= 0 ? v + 0.5 : v - 0.5);
}

bool ConfigSection::get_bool(const std::string& key, bool fallback) const {
    const ConfigEntry* e = find(key);
    if (!e) return fallback;
    std::string v = e->value;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("expected on/off: '" + e->value + "'", e->line);
}

const ConfigSection* ConfigFile::find(const std::string& name) const {
    for (const auto& s : sections)
        if (s.name == name) return &s;
    return nullptr;
}

const ConfigSection& ConfigFile::require(const std::string& name) const {
    const ConfigSection* s = find(name);
    if (!s) throw ConfigError("missing section [" + name + "] in " + path);
    return *s;
}

std::vector<const ConfigSection*> ConfigFile::with_prefix(const std::string& prefix) const {
    std::vector<const ConfigSection*> out;
    for (const auto& s : sections)
        if (s.name.rfind(prefix, 0) == 0) out.push_back(&s);
    return out;
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& path) {
    ConfigFile cfg;
    cfg.path = path;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    ConfigSection* current = nullptr;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (const size_t hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header", lineno);
            ConfigSection s;
            s.name = trim(line.substr(1, line.size() - 2));
            s.line = lineno;
            if (s.name.empty()) throw ConfigError("empty section name", lineno);
            cfg.sections.push_back(std::move(s));
            current = &cfg.sections.back();
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value': '" + line + "'", lineno);
        if (!current) throw ConfigError("entry before any [section]", lineno);
        ConfigEntry e;
        e.key = trim(line.substr(0, eq));
        e.value = trim(line.substr(eq + 1));
        e.line = lineno;
        if (e.key.empty()) throw ConfigError("empty key", lineno);
        current->entries.push_back(std::move(e));
    }
    return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    ConfigFile cfg = parse_string(ss.str(), path);
    return cfg;
}

}  // namespace iontrap
