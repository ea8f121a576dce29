#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "assom/errors.hpp"

namespace assom {

// Reads the TOML subset the experiment configs use: comments, [table] and
// [[array-of-tables]] headers, and key = value lines where a value is a
// quoted string, integer, float, boolean, or a flat array of those. Parsed
// into a json tree so config consumers share one accessor vocabulary.
namespace toml_lite {

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Removes a trailing comment that is not inside a quoted string.
inline std::string strip_comment(const std::string& s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_string = !in_string;
        else if (s[i] == '#' && !in_string) return s.substr(0, i);
    }
    return s;
}

inline bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
    return true;
}

inline nlohmann::json parse_scalar(const std::string& raw, int line, const std::string& where) {
    const std::string v = strip(raw);
    if (v.empty()) throw ParseError(where + ":" + std::to_string(line) + ": empty value");
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"')
            throw ParseError(where + ":" + std::to_string(line) + ": unterminated string");
        std::string out;
        for (std::size_t i = 1; i + 1 < v.size(); ++i) {
            if (v[i] == '\\' && i + 2 < v.size()) {
                ++i;
                switch (v[i]) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default:
                        throw ParseError(where + ":" + std::to_string(line) +
                                         ": unsupported escape \\" + v[i]);
                }
            } else {
                out += v[i];
            }
        }
        return out;
    }
    if (v == "true") return true;
    if (v == "false") return false;
    try {
        std::size_t used = 0;
        if (v.find_first_of(".eE") == std::string::npos ||
            (v.size() > 1 && (v.rfind("0x", 0) == 0))) {
            const long long i = std::stoll(v, &used);
            if (used == v.size()) return i;
        }
        const double d = std::stod(v, &used);
        if (used == v.size()) return d;
    } catch (const std::exception&) {
        // fall through to the error below
    }
    throw ParseError(where + ":" + std::to_string(line) + ": cannot parse value '" + v + "'");
}

inline nlohmann::json parse_value(const std::string& raw, int line, const std::string& where) {
    const std::string v = strip(raw);
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']')
            throw ParseError(where + ":" + std::to_string(line) + ": unterminated array");
        nlohmann::json arr = nlohmann::json::array();
        std::string inner = v.substr(1, v.size() - 2);
        std::string item;
        bool in_string = false;
        for (char c : inner) {
            if (c == '"') in_string = !in_string;
            if (c == ',' && !in_string) {
                if (!strip(item).empty()) arr.push_back(parse_scalar(item, line, where));
                item.clear();
            } else {
                item += c;
            }
        }
        if (!strip(item).empty()) arr.push_back(parse_scalar(item, line, where));
        return arr;
    }
    return parse_scalar(v, line, where);
}

} // namespace detail

inline nlohmann::json parse(const std::string& text, const std::string& where = "<config>") {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* current = &root;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = detail::strip(detail::strip_comment(line));
        if (s.empty()) continue;

        if (s.size() >= 4 && s.rfind("[[", 0) == 0 && s.substr(s.size() - 2) == "]]") {
            const std::string name = detail::strip(s.substr(2, s.size() - 4));
            if (!detail::valid_key(name))
                throw ParseError(where + ":" + std::to_string(line_no) + ": bad table name '" +
                                 name + "'");
            if (!root.contains(name)) root[name] = nlohmann::json::array();
            if (!root[name].is_array())
                throw ParseError(where + ":" + std::to_string(line_no) + ": '" + name +
                                 "' is already a non-array entry");
            root[name].push_back(nlohmann::json::object());
            current = &root[name].back();
            continue;
        }
        if (s.front() == '[' && s.back() == ']') {
            const std::string name = detail::strip(s.substr(1, s.size() - 2));
            if (!detail::valid_key(name))
                throw ParseError(where + ":" + std::to_string(line_no) + ": bad table name '" +
                                 name + "'");
            if (!root.contains(name)) root[name] = nlohmann::json::object();
            if (!root[name].is_object())
                throw ParseError(where + ":" + std::to_string(line_no) + ": '" + name +
                                 "' is already a non-table entry");
            current = &root[name];
            continue;
        }

        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ParseError(where + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::strip(s.substr(0, eq));
        if (!detail::valid_key(key))
            throw ParseError(where + ":" + std::to_string(line_no) + ": bad key '" + key + "'");
        (*current)[key] = detail::parse_value(s.substr(eq + 1), line_no, where);
    }
    return root;
}

inline nlohmann::json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

} // namespace toml_lite
} // namespace assom
