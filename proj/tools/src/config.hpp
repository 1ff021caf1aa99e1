#pragma once

// Flat key=value config files with optional [section] prefixes. Values are
// scalars or comma/bracket lists; every key a command does not consume is an
// error, so typos surface instead of silently using defaults.

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace rnlcli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ConfigMap {
  public:
    ConfigMap() = default;

    static ConfigMap from_file(const std::string& path);
    static ConfigMap from_text(const std::string& text);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& def) const;
    double get_real(const std::string& key, double def) const;
    std::int64_t get_int(const std::string& key, std::int64_t def) const;
    bool get_bool(const std::string& key, bool def) const;
    std::vector<double> get_reals(const std::string& key, std::vector<double> def) const;
    std::vector<std::int64_t> get_ints(const std::string& key,
                                       std::vector<std::int64_t> def) const;

    // Throws listing the keys nothing consumed.
    void reject_unknown() const;

    // Sorted key=value lines; the manifest hashes this.
    std::string canonical_text() const;

  private:
    std::map<std::string, std::string> kv_;
    mutable std::set<std::string> used_;
};

std::uint64_t fnv1a64(const std::string& text);

} // namespace rnlcli
