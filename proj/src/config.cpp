#include "erwlab/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "erwlab/errors.hpp"
#include "erwlab/rng.hpp"

namespace erwlab {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

}  // namespace

std::string ExperimentConfig::canonical() const {
    std::string out = "experiment=" + experiment + "\nseed=" + std::to_string(master_seed) + "\n";
    for (const auto& [key, value] : params) out += key + "=" + value + "\n";
    return out;
}

std::string ExperimentConfig::hash() const {
    const std::string text = canonical();
    std::uint64_t h = 0x243F6A8885A308D3ULL;
    for (unsigned char c : text) {
        h ^= c;
        h = splitmix64(h);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string ExperimentConfig::get_string(const std::string& key,
                                         const std::string& fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("parameter '" + key + "' is not a number: " + it->second);
    }
}

std::int64_t ExperimentConfig::get_int(const std::string& key, std::int64_t fallback) const {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("parameter '" + key + "' is not an integer: " + it->second);
    }
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    const std::string v = it->second;
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("parameter '" + key + "' is not a boolean: " + v);
}

std::vector<double> ExperimentConfig::get_double_list(
    const std::string& key, const std::vector<double>& fallback) const {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(it->second)) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("parameter '" + key + "' has a non-numeric item: " + item);
        }
    }
    if (out.empty()) throw ConfigError("parameter '" + key + "' is an empty list");
    return out;
}

std::vector<std::int64_t> ExperimentConfig::get_int_list(
    const std::string& key, const std::vector<std::int64_t>& fallback) const {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    std::vector<std::int64_t> out;
    for (const auto& item : split_list(it->second)) {
        try {
            out.push_back(std::stoll(item));
        } catch (const std::exception&) {
            throw ConfigError("parameter '" + key + "' has a non-integer item: " + item);
        }
    }
    if (out.empty()) throw ConfigError("parameter '" + key + "' is an empty list");
    return out;
}

void ExperimentConfig::require_known_keys(const std::vector<std::string>& known) const {
    for (const auto& [key, value] : params) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown parameter '" + key + "' for experiment '" + experiment +
                              "'");
    }
}

ExperimentConfig load_config_file(const std::filesystem::path& path,
                                  const std::string& experiment) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    ExperimentConfig cfg;
    cfg.experiment = experiment;
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                                  ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": expected key = value");
        if (section != experiment) continue;
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": empty key");
        cfg.params[key] = value;
    }
    return cfg;
}

const std::vector<std::string>& known_experiments() {
    static const std::vector<std::string> names = {"simulate", "oracle",  "contiguity",
                                                   "recurrence", "scaling", "kernels"};
    return names;
}

bool is_known_experiment(const std::string& name) {
    const auto& names = known_experiments();
    return std::find(names.begin(), names.end(), name) != names.end();
}

}  // namespace erwlab
