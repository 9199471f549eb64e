#include "shufflelab/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace shufflelab {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str(), path);
}

Config Config::parse_text(const std::string& text, const std::string& origin) {
    Config config;
    config.raw_ = text;
    config.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');  // '#' starts a comment anywhere
        std::string stripped = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (stripped.empty()) continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": bad section header");
            section = trim(stripped.substr(1, stripped.size() - 2));
            if (section.empty())
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section name");
            continue;
        }
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        std::string dotted = section.empty() ? key : section + "." + key;
        if (config.values_.count(dotted))
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key " + dotted);
        config.values_[dotted] = value;
    }
    return config;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(origin_ + ": missing required key " + key);
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

long Config::get_int(const std::string& key) const {
    const std::string text = get_string(key);
    try {
        std::size_t used = 0;
        long value = std::stol(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": key " + key + " is not an integer: " + text);
    }
}

long Config::get_int(const std::string& key, long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

double Config::get_double(const std::string& key) const {
    const std::string text = get_string(key);
    try {
        std::size_t used = 0;
        double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": key " + key + " is not a number: " + text);
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string text = get_string(key);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(origin_ + ": key " + key + " is not a boolean: " + text);
}

std::vector<long> Config::get_int_list(const std::string& key) const {
    const std::string text = get_string(key);
    std::vector<long> values;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            values.push_back(std::stol(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(origin_ + ": key " + key + " has a non-integer entry: " + item);
        }
    }
    if (values.empty()) throw ConfigError(origin_ + ": key " + key + " lists no values");
    return values;
}

std::uint64_t Config::get_seed(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string text = get_string(key);
    try {
        std::size_t used = 0;
        unsigned long long value = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": key " + key + " is not a seed: " + text);
    }
}

void Config::require_known_keys(const std::set<std::string>& allowed) const {
    std::string unknown;
    for (const auto& [key, value] : values_) {
        (void)value;
        if (!allowed.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
    }
    if (!unknown.empty())
        throw ConfigError(origin_ + ": unknown config keys: " + unknown);
}

std::uint64_t resolve_seed(const Config& config, const std::string& key) {
    if (const char* env = std::getenv("SHUFFLELAB_SEED")) {
        try {
            std::size_t used = 0;
            std::string text(env);
            std::uint64_t value = std::stoull(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return value;
        } catch (const std::exception&) {
            throw ConfigError("SHUFFLELAB_SEED is not an integer");
        }
    }
    return config.get_seed(key, kDefaultSeed);
}

}  // namespace shufflelab
