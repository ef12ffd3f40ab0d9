#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "enscade/config.hpp"
#include "enscade/solver.hpp"

namespace enscade {

/// Everything needed to reproduce a simulation bit for bit: the full config,
/// snapshot inventory with checksums, and stage wall times (informational).
struct RunManifest {
    std::string version;
    RunConfig config;
    std::vector<double> times;
    std::vector<std::string> files;      ///< snapshot paths relative to the manifest
    std::vector<std::string> checksums;  ///< FNV-1a 64 hex per file
    double wall_seconds = 0.0;

    void save(const std::filesystem::path& path) const;
    static RunManifest load(const std::filesystem::path& path);
};

/// Load the trajectory a manifest describes, verifying checksums.
Trajectory load_trajectory(const std::filesystem::path& manifest_path);

}  // namespace enscade
