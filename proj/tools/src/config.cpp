#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace rnlcli {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Strips a trailing comment; '#' inside double quotes does not count.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        else if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

std::string unquote(const std::string& v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
        return v.substr(1, v.size() - 2);
    return v;
}

std::vector<std::string> split_list(const std::string& raw, const std::string& key) {
    std::string v = trim(raw);
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']')
            throw ConfigError("key '" + key + "': unterminated list");
        v = v.substr(1, v.size() - 2);
    }
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(unquote(item));
    }
    return out;
}

double parse_real(const std::string& s, const std::string& key) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw ConfigError("key '" + key + "': expected a number, got '" + s + "'");
    return v;
}

std::int64_t parse_int(const std::string& s, const std::string& key) {
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw ConfigError("key '" + key + "': expected an integer, got '" + s + "'");
    return static_cast<std::int64_t>(v);
}

} // namespace

ConfigMap ConfigMap::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

ConfigMap ConfigMap::from_text(const std::string& text) {
    ConfigMap cfg;
    std::stringstream ss(text);
    std::string line;
    std::string prefix;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            std::string sec = trim(line.substr(1, line.size() - 2));
            prefix = sec.empty() ? "" : sec + ".";
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        std::string key = prefix + trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (cfg.kv_.count(key))
            throw ConfigError("duplicate key '" + key + "'");
        cfg.kv_[key] = val;
    }
    return cfg;
}

bool ConfigMap::has(const std::string& key) const { return kv_.count(key) != 0; }

std::string ConfigMap::get_string(const std::string& key, const std::string& def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    used_.insert(key);
    return unquote(it->second);
}

double ConfigMap::get_real(const std::string& key, double def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    used_.insert(key);
    return parse_real(unquote(it->second), key);
}

std::int64_t ConfigMap::get_int(const std::string& key, std::int64_t def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    used_.insert(key);
    return parse_int(unquote(it->second), key);
}

bool ConfigMap::get_bool(const std::string& key, bool def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    used_.insert(key);
    std::string v = unquote(it->second);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> ConfigMap::get_reals(const std::string& key, std::vector<double> def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    used_.insert(key);
    std::vector<double> out;
    for (const auto& s : split_list(it->second, key)) out.push_back(parse_real(s, key));
    return out;
}

std::vector<std::int64_t> ConfigMap::get_ints(const std::string& key,
                                              std::vector<std::int64_t> def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    used_.insert(key);
    std::vector<std::int64_t> out;
    for (const auto& s : split_list(it->second, key)) out.push_back(parse_int(s, key));
    return out;
}

void ConfigMap::reject_unknown() const {
    std::string bad;
    for (const auto& [k, v] : kv_) {
        (void)v;
        if (!used_.count(k)) bad += (bad.empty() ? "" : ", ") + k;
    }
    if (!bad.empty()) throw ConfigError("unknown config keys: " + bad);
}

std::string ConfigMap::canonical_text() const {
    std::string out;
    for (const auto& [k, v] : kv_) out += k + "=" + v + "\n";
    return out;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace rnlcli
