#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "erwlab/config.hpp"

namespace erwlab {

struct RunManifest {
    std::string config_hash;
    std::string tool_version;
    std::string experiment;
    std::uint64_t master_seed = 0;
    int workers = 1;
    double wall_time_s = 0.0;
    std::vector<std::string> outputs;  // paths relative to the manifest
    std::map<std::string, std::string> params;
    bool checks_passed = true;

    std::filesystem::path path;  // where the manifest was written
};

// Dispatches to the named experiment, writes its CSV/JSON artifacts under
// cfg.output_dir plus a manifest_<experiment>.json. In check mode the
// experiment's acceptance assertions are evaluated and recorded in
// checks_passed.
RunManifest run(const ExperimentConfig& cfg);

// Schema check plus an effective-parameter table (including derived
// quantities such as p from alpha and rounded window bounds); does not run.
void validate(const ExperimentConfig& cfg, std::ostream& out);

// Tidy long-format plot data derived from a finished run's outputs.
// Plots: msd | return | triadic | ks. Returns the written path.
std::filesystem::path emit_plot_data(const std::filesystem::path& manifest_path,
                                     const std::string& plot);

RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace erwlab
