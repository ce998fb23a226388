#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fext {

// Minimal TOML-style reader for the static experiment files: [section]
// headers and key = value lines with strings, integers, floats, booleans and
// flat homogeneous arrays. No nesting, no dates, no multi-line strings.
class ConfigFile {
public:
    using Value = std::variant<std::string, long long, double, bool, std::vector<double>,
                               std::vector<std::string>>;

    static ConfigFile load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("config: cannot open " + path.string());
        ConfigFile cfg;
        cfg.path_ = path.string();
        std::string line;
        std::string section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            strip_comment(line);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            if (trimmed.front() == '[') {
                if (trimmed.back() != ']') cfg.fail(lineno, "unterminated section header");
                section = trim(trimmed.substr(1, trimmed.size() - 2));
                if (section.empty()) cfg.fail(lineno, "empty section name");
                continue;
            }
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos) cfg.fail(lineno, "expected key = value");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string raw = trim(trimmed.substr(eq + 1));
            if (key.empty()) cfg.fail(lineno, "empty key");
            cfg.values_[section.empty() ? key : section + "." + key] = cfg.parse_value(raw, lineno);
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key) const {
        return expect<std::string>(key, "string");
    }
    std::string get_string(const std::string& key, const std::string& fallback) const {
        return has(key) ? get_string(key) : fallback;
    }

    long long get_int(const std::string& key) const { return expect<long long>(key, "integer"); }
    long long get_int(const std::string& key, long long fallback) const {
        return has(key) ? get_int(key) : fallback;
    }

    double get_double(const std::string& key) const {
        const Value& v = lookup(key);
        if (const auto* d = std::get_if<double>(&v)) return *d;
        if (const auto* i = std::get_if<long long>(&v)) return static_cast<double>(*i);
        throw std::runtime_error("config " + path_ + ": key '" + key + "' is not a number");
    }
    double get_double(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    bool get_bool(const std::string& key) const { return expect<bool>(key, "boolean"); }
    bool get_bool(const std::string& key, bool fallback) const {
        return has(key) ? get_bool(key) : fallback;
    }

    std::vector<double> get_double_array(const std::string& key) const {
        const Value& v = lookup(key);
        if (const auto* a = std::get_if<std::vector<double>>(&v)) return *a;
        throw std::runtime_error("config " + path_ + ": key '" + key + "' is not a numeric array");
    }
    std::vector<double> get_double_array(const std::string& key, std::vector<double> fallback) const {
        return has(key) ? get_double_array(key) : std::move(fallback);
    }

    std::vector<std::string> get_string_array(const std::string& key) const {
        const Value& v = lookup(key);
        if (const auto* a = std::get_if<std::vector<std::string>>(&v)) return *a;
        throw std::runtime_error("config " + path_ + ": key '" + key + "' is not a string array");
    }
    std::vector<std::string> get_string_array(const std::string& key,
                                              std::vector<std::string> fallback) const {
        return has(key) ? get_string_array(key) : std::move(fallback);
    }

private:
    std::map<std::string, Value> values_;
    std::string path_;

    [[noreturn]] void fail(int lineno, const std::string& message) const {
        std::ostringstream os;
        os << "config " << path_ << ":" << lineno << ": " << message;
        throw std::runtime_error(os.str());
    }

    const Value& lookup(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end())
            throw std::runtime_error("config " + path_ + ": missing key '" + key + "'");
        return it->second;
    }

    template <class T>
    T expect(const std::string& key, const char* what) const {
        const Value& v = lookup(key);
        if (const auto* t = std::get_if<T>(&v)) return *t;
        throw std::runtime_error("config " + path_ + ": key '" + key + "' is not a " + what);
    }

    static void strip_comment(std::string& line) {
        bool in_string = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_string = !in_string;
            if (line[i] == '#' && !in_string) {
                line.erase(i);
                return;
            }
        }
    }

    static std::string trim(const std::string& s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }

    Value parse_value(const std::string& raw, int lineno) const {
        if (raw.empty()) fail(lineno, "empty value");
        if (raw.front() == '"') {
            if (raw.size() < 2 || raw.back() != '"') fail(lineno, "unterminated string");
            return raw.substr(1, raw.size() - 2);
        }
        if (raw == "true") return true;
        if (raw == "false") return false;
        if (raw.front() == '[') {
            if (raw.back() != ']') fail(lineno, "unterminated array");
            const std::string inner = trim(raw.substr(1, raw.size() - 2));
            std::vector<std::string> parts;
            std::string cur;
            bool in_string = false;
            for (char c : inner) {
                if (c == '"') in_string = !in_string;
                if (c == ',' && !in_string) {
                    parts.push_back(trim(cur));
                    cur.clear();
                } else {
                    cur += c;
                }
            }
            if (!trim(cur).empty()) parts.push_back(trim(cur));
            if (parts.empty()) return std::vector<double>{};
            if (!parts[0].empty() && parts[0].front() == '"') {
                std::vector<std::string> out;
                for (const auto& p : parts) {
                    if (p.size() < 2 || p.front() != '"' || p.back() != '"')
                        fail(lineno, "mixed or malformed string array");
                    out.push_back(p.substr(1, p.size() - 2));
                }
                return out;
            }
            std::vector<double> out;
            for (const auto& p : parts) out.push_back(parse_number(p, lineno));
            return out;
        }
        // number: integer when it looks like one
        if (raw.find_first_of(".eE") == std::string::npos) {
            try {
                std::size_t used = 0;
                const long long v = std::stoll(raw, &used);
                if (used == raw.size()) return v;
            } catch (...) {
            }
        }
        return parse_number(raw, lineno);
    }

    double parse_number(const std::string& raw, int lineno) const {
        try {
            std::size_t used = 0;
            const double v = std::stod(raw, &used);
            if (used != raw.size()) fail(lineno, "malformed number '" + raw + "'");
            return v;
        } catch (const std::exception&) {
            fail(lineno, "malformed number '" + raw + "'");
        }
    }
};

}  // namespace fext
