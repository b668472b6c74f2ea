#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

// Flat key-value text files: "key = value" lines, '#' comments. Pair lists
// are semicolon-separated "a,b" entries.

namespace gsep {

class Config {
public:
    static Config load(const std::string& path);
    static Config parse(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& dflt) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double dflt) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int dflt) const;
    uint64_t get_u64(const std::string& key) const;
    uint64_t get_u64(const std::string& key, uint64_t dflt) const;
    std::vector<std::pair<int, int>> get_int_pairs(const std::string& key) const;
    std::vector<std::pair<double, double>> get_double_pairs(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    std::string serialize() const;

private:
    std::map<std::string, std::string> kv_;
};

}  // namespace gsep
