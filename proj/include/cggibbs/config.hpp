#ifndef CGGIBBS_CONFIG_HPP
#define CGGIBBS_CONFIG_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cggibbs {

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (const char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 1099511628211ULL;
    }
    return hash;
}

} // namespace detail

/// Flat key=value store with optional [section] scoping. Lookups are
/// section-first ("section.key"), falling back to the unscoped key, so a
/// config file can share common settings across commands.
class Config {
  public:
    Config() = default;

    /// Parse `key = value` lines with [section] headers, `#`/`;` comments.
    static Config from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("config: cannot open " + path);
        Config cfg;
        std::string line, section;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const std::string stripped = detail::trim(line);
            if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
            if (stripped.front() == '[') {
                if (stripped.back() != ']')
                    throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                                ": unterminated section header");
                section = detail::trim(stripped.substr(1, stripped.size() - 2));
                continue;
            }
            const auto eq = stripped.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                            ": expected key = value");
            const std::string key = detail::trim(stripped.substr(0, eq));
            if (key.empty())
                throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                            ": empty key");
            cfg.set(section.empty() ? key : section + "." + key,
                    detail::trim(stripped.substr(eq + 1)));
        }
        return cfg;
    }

    /// Flag override (`--set key=value` / `--set section.key=value`).
    void set(const std::string& key, const std::string& value) {
        values_[key] = value;
    }

    bool has(const std::string& section, const std::string& key) const {
        return values_.count(section + "." + key) > 0 || values_.count(key) > 0;
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        const auto scoped = values_.find(section + "." + key);
        if (scoped != values_.end()) return scoped->second;
        const auto flat = values_.find(key);
        if (flat != values_.end()) return flat->second;
        return fallback;
    }

    std::string require_string(const std::string& section, const std::string& key) const {
        if (!has(section, key))
            throw std::invalid_argument("config: missing required key '" + key +
                                        "' (section [" + section + "])");
        return get_string(section, key, "");
    }

    long long get_int(const std::string& section, const std::string& key,
                      long long fallback) const {
        if (!has(section, key)) return fallback;
        const std::string raw = get_string(section, key, "");
        try {
            std::size_t used = 0;
            const long long v = std::stoll(raw, &used);
            if (used != raw.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("config: key '" + key +
                                        "' is not an integer: '" + raw + "'");
        }
    }

    double get_real(const std::string& section, const std::string& key,
                    double fallback) const {
        if (!has(section, key)) return fallback;
        const std::string raw = get_string(section, key, "");
        try {
            std::size_t used = 0;
            const double v = std::stod(raw, &used);
            if (used != raw.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("config: key '" + key + "' is not a number: '" +
                                        raw + "'");
        }
    }

    bool get_bool(const std::string& section, const std::string& key,
                  bool fallback) const {
        if (!has(section, key)) return fallback;
        const std::string raw = get_string(section, key, "");
        if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
        if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
        throw std::invalid_argument("config: key '" + key + "' is not a boolean: '" +
                                    raw + "'");
    }

    /// Comma-separated positive integer grid, e.g. "16,32,64".
    std::vector<long long> get_grid(const std::string& section, const std::string& key,
                                    const std::vector<long long>& fallback) const {
        if (!has(section, key)) {
            if (fallback.empty())
                throw std::invalid_argument("config: missing required grid '" + key + "'");
            return fallback;
        }
        const std::string raw = get_string(section, key, "");
        std::vector<long long> grid;
        std::stringstream ss(raw);
        std::string token;
        while (std::getline(ss, token, ',')) {
            token = detail::trim(token);
            if (token.empty()) continue;
            try {
                std::size_t used = 0;
                const long long v = std::stoll(token, &used);
                if (used != token.size()) throw std::invalid_argument("trailing");
                grid.push_back(v);
            } catch (const std::exception&) {
                throw std::invalid_argument("config: grid '" + key +
                                            "' has a non-integer entry: '" + token + "'");
            }
        }
        if (grid.empty())
            throw std::invalid_argument("config: grid '" + key + "' is empty");
        return grid;
    }

    /// Sorted key=value dump; the basis of the provenance hash.
    std::string canonical() const {
        std::string out;
        for (const auto& [key, value] : values_) {
            out += key;
            out += '=';
            out += value;
            out += '\n';
        }
        return out;
    }

    /// FNV-1a hash of the canonical dump, as 16 hex digits.
    std::string hash() const {
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(detail::fnv1a64(canonical())));
        return buf;
    }

  private:
    std::map<std::string, std::string> values_;
};

} // namespace cggibbs

#endif
