#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "firmscope/detail/util.hpp"

namespace firmscope {

// INI-style key=value configuration. Section headers prefix the keys that
// follow them ("[emulation]" + "boot_timeout_s = 60" -> "emulation.boot_timeout_s").
// Repeated keys accumulate; get() returns the last one.
class Config {
public:
    Config() = default;

    static Config from_file(const std::filesystem::path& p) {
        Config c;
        std::ifstream in(p);
        if (!in) throw std::runtime_error("cannot read config " + p.string());
        std::string line, section;
        while (std::getline(in, line)) {
            c.parse_line(line, section);
        }
        return c;
    }

    static Config from_string(const std::string& text) {
        Config c;
        std::string section;
        for (auto& line : detail::split(text, '\n')) c.parse_line(line, section);
        return c;
    }

    std::optional<std::string> get(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end() || it->second.empty()) return std::nullopt;
        return it->second.back();
    }

    std::vector<std::string> get_all(const std::string& key) const {
        auto it = values_.find(key);
        return it == values_.end() ? std::vector<std::string>{} : it->second;
    }

    int get_int(const std::string& key, int fallback) const {
        auto v = get(key);
        if (!v) return fallback;
        try {
            return std::stoi(*v);
        } catch (...) {
            return fallback;
        }
    }

    double get_double(const std::string& key, double fallback) const {
        auto v = get(key);
        if (!v) return fallback;
        try {
            return std::stod(*v);
        } catch (...) {
            return fallback;
        }
    }

    void set(const std::string& key, const std::string& value) { values_[key].push_back(value); }

private:
    void parse_line(const std::string& raw, std::string& section) {
        std::string line = detail::trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') return;
        if (line.front() == '[' && line.back() == ']') {
            section = detail::trim(line.substr(1, line.size() - 2));
            return;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) return;
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
            val = val.substr(1, val.size() - 2);
        if (!section.empty()) key = section + "." + key;
        if (!key.empty()) values_[key].push_back(val);
    }

    std::map<std::string, std::vector<std::string>> values_;
};

}  // namespace firmscope
