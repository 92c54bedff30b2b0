#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace erwlab {

inline constexpr const char* kToolVersion = "erwlab 1.0.0";

// Flat key=value configuration for one experiment. Files are INI-style with
// one section per experiment; command-line flags override file values.
struct ExperimentConfig {
    std::string experiment;
    std::map<std::string, std::string> params;
    std::uint64_t master_seed = 1;
    std::filesystem::path output_dir = "out";
    int workers = 1;
    bool check = false;

    // Canonical serialization of everything that determines numeric output:
    // experiment, seed, and the sorted parameter list. Worker count and
    // output directory are deliberately excluded so results are
    // byte-comparable across machines and worker counts.
    std::string canonical() const;
    std::string hash() const;  // 16 hex digits over canonical()

    bool has(const std::string& key) const { return params.count(key) > 0; }
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const;
    std::vector<std::int64_t> get_int_list(const std::string& key,
                                           const std::vector<std::int64_t>& fallback) const;

    // ConfigError if params contains a key outside `known`.
    void require_known_keys(const std::vector<std::string>& known) const;
};

// Parses the [experiment] section of an INI-style file. Lines are
// `key = value`; '#' and ';' start comments; unknown sections are ignored.
ExperimentConfig load_config_file(const std::filesystem::path& path,
                                  const std::string& experiment);

const std::vector<std::string>& known_experiments();
bool is_known_experiment(const std::string& name);

}  // namespace erwlab
