#pragma once

// Minimal TOML subset reader, enough for archeval.toml presets: [section]
// headers, scalar keys (string/int/float/bool) and flat string arrays. No
// TOML package ships in this environment; the config surface is small and
// pinned, so a subset reader keeps the dependency list honest.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "archeval/error.hpp"
#include "archeval/text.hpp"

namespace archeval::detail {

class TomlSubset {
public:
    static TomlSubset parse_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
        std::string content((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        return parse(content, path.string());
    }

    static TomlSubset parse(std::string_view content, const std::string& origin = "<memory>") {
        TomlSubset t;
        std::string section;
        std::size_t pos = 0, line_no = 0;
        while (pos <= content.size()) {
            std::size_t eol = content.find('\n', pos);
            std::string_view line = content.substr(
                pos, (eol == std::string_view::npos ? content.size() : eol) - pos);
            ++line_no;
            std::string_view t_line = text::trim(line);
            if (!t_line.empty() && t_line[0] != '#') {
                if (t_line.front() == '[') {
                    if (t_line.back() != ']') {
                        throw Error(ErrorCode::ConfigError, origin + ":" +
                                                                std::to_string(line_no) +
                                                                ": unterminated section header");
                    }
                    section = std::string(text::trim(t_line.substr(1, t_line.size() - 2)));
                } else {
                    std::size_t eq = t_line.find('=');
                    if (eq == std::string_view::npos) {
                        throw Error(ErrorCode::ConfigError,
                                    origin + ":" + std::to_string(line_no) + ": expected key = value");
                    }
                    std::string key(text::trim(t_line.substr(0, eq)));
                    std::string_view value = text::trim(t_line.substr(eq + 1));
                    std::string full = section.empty() ? key : section + "." + key;
                    if (!value.empty() && value.front() == '[') {
                        t.arrays_[full] = parse_array(value, origin, line_no);
                    } else {
                        t.values_[full] = parse_scalar(value, origin, line_no);
                    }
                }
            }
            if (eol == std::string_view::npos) break;
            pos = eol + 1;
        }
        return t;
    }

    bool has(const std::string& key) const {
        return values_.count(key) > 0 || arrays_.count(key) > 0;
    }

    std::optional<std::string> get_string(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<long> get_int(const std::string& key) const {
        auto s = get_string(key);
        if (!s) return std::nullopt;
        try {
            return std::stol(*s);
        } catch (...) {
            throw Error(ErrorCode::ConfigError, "config key '" + key + "' is not an integer");
        }
    }

    std::optional<double> get_double(const std::string& key) const {
        auto s = get_string(key);
        if (!s) return std::nullopt;
        try {
            return std::stod(*s);
        } catch (...) {
            throw Error(ErrorCode::ConfigError, "config key '" + key + "' is not a number");
        }
    }

    std::optional<bool> get_bool(const std::string& key) const {
        auto s = get_string(key);
        if (!s) return std::nullopt;
        if (*s == "true") return true;
        if (*s == "false") return false;
        throw Error(ErrorCode::ConfigError, "config key '" + key + "' is not a boolean");
    }

    std::optional<std::vector<std::string>> get_array(const std::string& key) const {
        auto it = arrays_.find(key);
        if (it == arrays_.end()) return std::nullopt;
        return it->second;
    }

    /// All keys under `section.` with the prefix removed.
    std::vector<std::pair<std::string, std::string>> section_entries(
        const std::string& section) const {
        std::vector<std::pair<std::string, std::string>> out;
        std::string prefix = section + ".";
        for (const auto& [k, v] : values_) {
            if (text::starts_with(k, prefix)) out.emplace_back(k.substr(prefix.size()), v);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    static std::string parse_scalar(std::string_view value, const std::string& origin,
                                    std::size_t line_no) {
        if (value.empty()) {
            throw Error(ErrorCode::ConfigError,
                        origin + ":" + std::to_string(line_no) + ": empty value");
        }
        if (value.front() == '"') {
            std::size_t end = value.find('"', 1);
            if (end == std::string_view::npos) {
                throw Error(ErrorCode::ConfigError,
                            origin + ":" + std::to_string(line_no) + ": unterminated string");
            }
            return std::string(value.substr(1, end - 1));
        }
        std::size_t hash = value.find('#');
        if (hash != std::string_view::npos) value = text::trim(value.substr(0, hash));
        return std::string(value);
    }

    static std::vector<std::string> parse_array(std::string_view value, const std::string& origin,
                                                std::size_t line_no) {
        if (value.back() != ']') {
            throw Error(ErrorCode::ConfigError,
                        origin + ":" + std::to_string(line_no) + ": unterminated array");
        }
        std::vector<std::string> out;
        std::string_view inner = value.substr(1, value.size() - 2);
        std::size_t start = 0;
        while (start <= inner.size()) {
            std::size_t comma = inner.find(',', start);
            std::string_view item = comma == std::string_view::npos
                                        ? inner.substr(start)
                                        : inner.substr(start, comma - start);
            item = text::trim(item);
            if (!item.empty()) out.push_back(parse_scalar(item, origin, line_no));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        return out;
    }

    std::unordered_map<std::string, std::string> values_;
    std::unordered_map<std::string, std::vector<std::string>> arrays_;
};

}  // namespace archeval::detail
