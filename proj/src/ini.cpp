#include "parce/ini.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace parce {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Ini Ini::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

Ini Ini::from_string(const std::string& text) {
    Ini ini;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw std::runtime_error("bad section header at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            ini.data_[section];  // allow empty sections
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("expected key = value at line " + std::to_string(lineno));
        ini.data_[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return ini;
}

bool Ini::has(const std::string& section, const std::string& key) const {
    auto s = data_.find(section);
    return s != data_.end() && s->second.count(key) > 0;
}

bool Ini::has_section(const std::string& section) const { return data_.count(section) > 0; }

std::string Ini::get_str(const std::string& section, const std::string& key) const {
    auto s = data_.find(section);
    if (s == data_.end()) throw std::runtime_error("missing config section [" + section + "]");
    auto k = s->second.find(key);
    if (k == s->second.end()) throw std::runtime_error("missing config key " + section + "." + key);
    return k->second;
}

std::string Ini::get_str(const std::string& section, const std::string& key, const std::string& def) const {
    return has(section, key) ? get_str(section, key) : def;
}

double Ini::get_double(const std::string& section, const std::string& key) const {
    const std::string v = get_str(section, key);
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::runtime_error("bad number for " + section + "." + key + ": " + v);
    return d;
}

double Ini::get_double(const std::string& section, const std::string& key, double def) const {
    return has(section, key) ? get_double(section, key) : def;
}

long Ini::get_int(const std::string& section, const std::string& key) const {
    const std::string v = get_str(section, key);
    std::size_t pos = 0;
    long n = std::stol(v, &pos);
    if (pos != v.size()) throw std::runtime_error("bad integer for " + section + "." + key + ": " + v);
    return n;
}

long Ini::get_int(const std::string& section, const std::string& key, long def) const {
    return has(section, key) ? get_int(section, key) : def;
}

bool Ini::get_bool(const std::string& section, const std::string& key, bool def) const {
    if (!has(section, key)) return def;
    std::string v = get_str(section, key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::runtime_error("bad boolean for " + section + "." + key + ": " + v);
}

std::vector<std::string> Ini::sections_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [name, _] : data_)
        if (name.rfind(prefix, 0) == 0) out.push_back(name);
    return out;
}

void Ini::set(const std::string& section, const std::string& key, const std::string& value) {
    data_[section][key] = value;
}

void Ini::merge(const Ini& other) {
    for (const auto& [sec, kv] : other.data_)
        for (const auto& [k, v] : kv) data_[sec][k] = v;
}

}  // namespace parce
