#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "shufflelab/types.hpp"

namespace shufflelab {

// Flat "key = value" document with [section] headers, '#' comments, LF lines.
// Keys are addressed as "section.key". Parsing is strict: commands declare the
// keys they accept and anything else is a ConfigError.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text, const std::string& origin = "<text>");

    bool has(const std::string& dotted_key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    long get_int(const std::string& key) const;
    long get_int(const std::string& key, long fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<long> get_int_list(const std::string& key) const;   // comma-separated
    std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;

    // Throws ConfigError naming every key outside the allowed set.
    void require_known_keys(const std::set<std::string>& allowed) const;

    const std::string& raw_text() const { return raw_; }

private:
    std::map<std::string, std::string> values_;
    std::string raw_;
    std::string origin_;
};

// Applies the SHUFFLELAB_SEED environment override, else config value, else the
// documented default seed.
inline constexpr std::uint64_t kDefaultSeed = 20240715;
std::uint64_t resolve_seed(const Config& config, const std::string& key);

}  // namespace shufflelab
