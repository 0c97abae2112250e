#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ecosub/config.hpp"

namespace ecosub {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNotConverged = 3;
inline constexpr int kExitIo = 4;
inline constexpr int kExitInternal = 5;

struct OutputFile {
    std::string name;
    std::string fnv1a;  // content hash
};

struct RunManifest {
    std::string config_hash;
    std::string version;
    std::string rng;
    std::string job;
    std::string status;  // ok, not-converged, check-failed
    std::vector<OutputFile> files;
    std::optional<double> wall_clock;
    int exit_code = kExitOk;
};

struct RunOptions {
    bool timing = false;  // adds wall-clock seconds to the manifest
};

// Runs one job, writes its outputs and manifest.json into out_dir.
RunManifest run_job(const JobConfig& cfg, const std::filesystem::path& out_dir,
                    const RunOptions& opt = {});

struct CheckItem {
    std::string name;
    bool passed = false;
    bool gating = true;
    double value = 0.0;
    double limit = 0.0;
    std::string note;
};

// Invariant suite over the shipped presets.
std::vector<CheckItem> self_check();

nlohmann::json manifest_json(const RunManifest& m);

}  // namespace ecosub
