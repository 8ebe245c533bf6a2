#include "fringe/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fringe::config {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' &&
            c != '-' && c != '.')
            return false;
    }
    return true;
}

}  // namespace

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw_error(ErrorKind::parse, "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

Config Config::parse(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw_error(ErrorKind::parse,
                            origin + ":" + std::to_string(line_no) +
                                ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!valid_key(section))
                throw_error(ErrorKind::parse,
                            origin + ":" + std::to_string(line_no) +
                                ": bad section name '" + section + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw_error(ErrorKind::parse, origin + ":" +
                                              std::to_string(line_no) +
                                              ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!section.empty()) key = section + "." + key;
        if (!valid_key(key))
            throw_error(ErrorKind::parse, origin + ":" +
                                              std::to_string(line_no) +
                                              ": bad key '" + key + "'");
        if (value.empty())
            throw_error(ErrorKind::parse, origin + ":" +
                                              std::to_string(line_no) +
                                              ": empty value for '" + key +
                                              "'");
        if (!cfg.values_.count(key)) cfg.ordered_keys_.push_back(key);
        cfg.values_[key] = value;
    }
    return cfg;
}

void Config::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw_error(ErrorKind::parse,
                    "override must have the form key=value: " + assignment);
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    if (!valid_key(key) || value.empty())
        throw_error(ErrorKind::parse, "bad override: " + assignment);
    if (!values_.count(key)) ordered_keys_.push_back(key);
    values_[key] = value;
}

bool Config::has(const std::string& key) const { return values_.count(key); }

const std::string& Config::raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
        throw_error(ErrorKind::missing_key,
                    "missing required config key '" + key + "' (" + origin_ +
                        ")");
    return it->second;
}

std::string Config::get_string(const std::string& key) const {
    return raw(key);
}

double Config::get_double(const std::string& key) const {
    const std::string& v = raw(key);
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size())
            throw_error(ErrorKind::parse,
                        "trailing junk in numeric value for '" + key + "': " + v);
        return d;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw_error(ErrorKind::parse,
                    "cannot parse '" + v + "' as a number for key '" + key +
                        "'");
    }
}

long Config::get_long(const std::string& key) const {
    const double d = get_double(key);
    const long l = static_cast<long>(d);
    if (static_cast<double>(l) != d)
        throw_error(ErrorKind::parse, "expected an integer for key '" + key +
                                          "', got " + raw(key));
    return l;
}

std::vector<double> Config::get_double_list(const std::string& key) const {
    const std::string& v = raw(key);
    std::vector<double> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw_error(ErrorKind::parse, "cannot parse list item '" + item +
                                              "' for key '" + key + "'");
        }
    }
    if (out.empty())
        throw_error(ErrorKind::parse, "empty list for key '" + key + "'");
    return out;
}

std::optional<double> Config::maybe_double(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return get_double(key);
}

double Config::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long Config::get_long_or(const std::string& key, long fallback) const {
    return has(key) ? get_long(key) : fallback;
}

std::string Config::get_string_or(const std::string& key,
                                  const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

std::vector<std::string> Config::keys_with_prefix(
    const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& k : ordered_keys_)
        if (k.rfind(prefix, 0) == 0) out.push_back(k);
    return out;
}

std::vector<std::string> Config::sections(const std::string& prefix) const {
    std::vector<std::string> out;
    const std::string p = prefix + ".";
    for (const auto& k : ordered_keys_) {
        if (k.rfind(p, 0) != 0) continue;
        const auto rest = k.substr(p.size());
        const auto dot = rest.find('.');
        if (dot == std::string::npos) continue;
        const std::string name = rest.substr(0, dot);
        if (std::find(out.begin(), out.end(), name) == out.end())
            out.push_back(name);
    }
    return out;
}

std::string format_number(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string csv_row(const std::vector<std::string>& cells) {
    std::string row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) row += ',';
        row += cells[i];
    }
    row += '\n';
    return row;
}

}  // namespace fringe::config
