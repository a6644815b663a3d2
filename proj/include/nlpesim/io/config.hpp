#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nlpesim/util/error.hpp"

namespace nlpesim {

// Structured-text config: `key = value` lines grouped under `[section]`
// headers, `#` or `;` comments, UTF-8. Keys are addressed as
// "section.key". Every diagnostic carries file and line so a bad value in
// a long scenario file is a one-glance fix.
class ConfigFile {
  public:
    static ConfigFile parse_text(const std::string& text, const std::string& source) {
        ConfigFile cfg;
        cfg.source_ = source;
        std::istringstream in(text);
        std::string line;
        std::string section;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::string s = strip(line);
            if (s.empty() || s[0] == '#' || s[0] == ';')
                continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    throw config_error(cfg.where(line_no) + ": unterminated section header");
                section = strip(s.substr(1, s.size() - 2));
                if (section.empty())
                    throw config_error(cfg.where(line_no) + ": empty section name");
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw config_error(cfg.where(line_no) + ": expected 'key = value'");
            const std::string key = strip(s.substr(0, eq));
            const std::string value = strip(s.substr(eq + 1));
            if (key.empty())
                throw config_error(cfg.where(line_no) + ": empty key");
            if (section.empty())
                throw config_error(cfg.where(line_no) + ": key '" + key +
                                   "' appears before any [section]");
            const std::string full = section + "." + key;
            if (cfg.entries_.count(full))
                throw config_error(cfg.where(line_no) + ": duplicate key '" + full +
                                   "' (first set on line " +
                                   std::to_string(cfg.entries_[full].line) + ")");
            cfg.entries_[full] = Entry{value, line_no, false};
        }
        return cfg;
    }

    static ConfigFile parse_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw config_error("config: cannot open '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_text(ss.str(), path);
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end())
            return fallback;
        it->second.used = true;
        return it->second.value;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end())
            return fallback;
        it->second.used = true;
        return parse_double(it->second.value, key, it->second.line);
    }

    std::vector<double> get_doubles(const std::string& key,
                                    const std::vector<double>& fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end())
            return fallback;
        it->second.used = true;
        std::vector<double> out;
        std::istringstream ss(it->second.value);
        std::string tok;
        while (ss >> tok)
            out.push_back(parse_double(tok, key, it->second.line));
        if (out.empty())
            throw config_error(where(it->second.line) + ": key '" + key +
                               "' expects one or more numbers");
        return out;
    }

    std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end())
            return fallback;
        it->second.used = true;
        try {
            std::size_t used = 0;
            const std::uint64_t v = std::stoull(it->second.value, &used);
            if (used != it->second.value.size())
                throw std::invalid_argument(it->second.value);
            return v;
        } catch (const std::exception&) {
            throw config_error(where(it->second.line) + ": key '" + key +
                               "' expects a nonnegative integer, got '" + it->second.value + "'");
        }
    }

    int get_int(const std::string& key, int fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end())
            return fallback;
        it->second.used = true;
        try {
            std::size_t used = 0;
            const int v = std::stoi(it->second.value, &used);
            if (used != it->second.value.size())
                throw std::invalid_argument(it->second.value);
            return v;
        } catch (const std::exception&) {
            throw config_error(where(it->second.line) + ": key '" + key +
                               "' expects an integer, got '" + it->second.value + "'");
        }
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end())
            return fallback;
        it->second.used = true;
        std::string v = it->second.value;
        std::transform(v.begin(), v.end(), v.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (v == "true" || v == "1" || v == "yes" || v == "on")
            return true;
        if (v == "false" || v == "0" || v == "no" || v == "off")
            return false;
        throw config_error(where(it->second.line) + ": key '" + key +
                           "' expects a boolean, got '" + it->second.value + "'");
    }

    // Call after loading a scenario: any key nobody asked for is a typo in
    // the file, not a silently ignored setting.
    void reject_unknown_keys() const {
        for (const auto& [key, entry] : entries_)
            if (!entry.used)
                throw config_error(where(entry.line) + ": unknown key '" + key + "'");
    }

    const std::string& source() const { return source_; }

    int line_of(const std::string& key) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second.line;
    }

    // Re-raise a semantic validation failure with the offending line when
    // the key came from this file.
    std::string describe(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end())
            return source_ + ": key '" + key + "'";
        return where(it->second.line) + ": key '" + key + "'";
    }

  private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool used = false;
    };

    static std::string strip(const std::string& s) {
        std::size_t b = 0;
        std::size_t e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
            ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
            --e;
        return s.substr(b, e - b);
    }

    std::string where(int line) const { return source_ + ":" + std::to_string(line); }

    double parse_double(const std::string& raw, const std::string& key, int line) const {
        try {
            std::size_t used = 0;
            const double v = std::stod(raw, &used);
            if (used != raw.size())
                throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            throw config_error(where(line) + ": key '" + key + "' expects a number, got '" +
                               raw + "'");
        }
    }

    std::string source_ = "<defaults>";
    std::map<std::string, Entry> entries_;
};

} // namespace nlpesim
