#include "gsep/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gsep {

namespace {
std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}
}  // namespace

Config Config::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse(ss.str());
}

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) cfg.kv_[key] = val;
    }
    return cfg;
}

std::string Config::get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw std::runtime_error("missing config key: " + key);
    return it->second;
}
std::string Config::get_string(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
}
double Config::get_double(const std::string& key) const { return std::stod(get_string(key)); }
double Config::get_double(const std::string& key, double dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : std::stod(it->second);
}
int Config::get_int(const std::string& key) const { return std::stoi(get_string(key)); }
int Config::get_int(const std::string& key, int dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : std::stoi(it->second);
}
uint64_t Config::get_u64(const std::string& key) const { return std::stoull(get_string(key)); }
uint64_t Config::get_u64(const std::string& key, uint64_t dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : std::stoull(it->second);
}

std::vector<std::pair<int, int>> Config::get_int_pairs(const std::string& key) const {
    std::vector<std::pair<int, int>> out;
    std::istringstream is(get_string(key));
    std::string item;
    while (std::getline(is, item, ';')) {
        size_t comma = item.find(',');
        if (comma == std::string::npos) throw std::runtime_error("bad pair in " + key);
        out.emplace_back(std::stoi(trim(item.substr(0, comma))),
                         std::stoi(trim(item.substr(comma + 1))));
    }
    return out;
}

std::vector<std::pair<double, double>> Config::get_double_pairs(const std::string& key) const {
    std::vector<std::pair<double, double>> out;
    std::istringstream is(get_string(key));
    std::string item;
    while (std::getline(is, item, ';')) {
        size_t comma = item.find(',');
        if (comma == std::string::npos) throw std::runtime_error("bad pair in " + key);
        out.emplace_back(std::stod(trim(item.substr(0, comma))),
                         std::stod(trim(item.substr(comma + 1))));
    }
    return out;
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    std::vector<double> out;
    std::istringstream is(get_string(key));
    std::string item;
    while (std::getline(is, item, ',')) out.push_back(std::stod(trim(item)));
    return out;
}

std::string Config::serialize() const {
    std::ostringstream os;
    for (const auto& [k, v] : kv_) os << k << " = " << v << "\n";
    return os.str();
}

}  // namespace gsep
