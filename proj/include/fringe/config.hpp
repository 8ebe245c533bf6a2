#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fringe/error.hpp"

namespace fringe::config {

// Flat key-value config, INI style. `[section]` headers prefix the keys
// that follow ("section.key"); `#` starts a comment; values are plain
// strings parsed on demand. Physical quantities carry their unit in the
// key name (window_ns, length_m, k_rad_m, ...).
class Config {
  public:
    static Config load(const std::string& path);
    static Config parse(const std::string& text, const std::string& origin);

    // Applies a "key=value" override, replacing or inserting the key.
    void apply_override(const std::string& assignment);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    long get_long(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;

    std::optional<double> maybe_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    long get_long_or(const std::string& key, long fallback) const;
    std::string get_string_or(const std::string& key,
                              const std::string& fallback) const;

    // Keys with the given prefix, in file order.
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

    // Section labels (second path component) under a prefix, in file order:
    // e.g. sections("budget") -> {"local_20ns", ...}.
    std::vector<std::string> sections(const std::string& prefix) const;

  private:
    const std::string& raw(const std::string& key) const;

    std::map<std::string, std::string> values_;
    std::vector<std::string> ordered_keys_;
    std::string origin_;
};

// CSV conventions: '.' decimal separator, LF line endings, header always
// present, 12 significant digits.
std::string format_number(double v);
std::string csv_row(const std::vector<std::string>& cells);

}  // namespace fringe::config
