// Minimal INI reader: [section] headers, key = value lines, '#'/';' comments.
#pragma once

#include <map>
#include <string>
#include <vector>

namespace parce {

class Ini {
public:
    Ini() = default;

    static Ini from_file(const std::string& path);
    static Ini from_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    bool has_section(const std::string& section) const;

    std::string get_str(const std::string& section, const std::string& key) const;
    std::string get_str(const std::string& section, const std::string& key, const std::string& def) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double def) const;
    long get_int(const std::string& section, const std::string& key) const;
    long get_int(const std::string& section, const std::string& key, long def) const;
    bool get_bool(const std::string& section, const std::string& key, bool def) const;

    std::vector<std::string> sections_with_prefix(const std::string& prefix) const;

    void set(const std::string& section, const std::string& key, const std::string& value);

    // Later files override earlier keys.
    void merge(const Ini& other);

private:
    // section -> key -> value
    std::map<std::string, std::map<std::string, std::string>> data_;
};

}  // namespace parce
