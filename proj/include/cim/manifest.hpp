#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cim/noise.hpp"
#include "cim/serialize.hpp"

namespace cim {

/// Provenance record for one CLI run; holds everything needed to reproduce
/// the run and the canonical hashes of every artifact it wrote.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;  // full argument vector, re-runnable as-is
    std::uint64_t seed = 0;
    NoiseSpec noise;
    double wall_time_s = 0.0;

    struct Artifact {
        std::string path;
        std::string hash;  // "fnv1a64:<hex>"
    };
    std::vector<Artifact> artifacts;
};

/// Content hash that ignores volatile fields: JSON / NDJSON files are parsed,
/// wall-clock keys are stripped and the canonical dump is hashed; any other
/// file hashes raw bytes.
std::string canonical_file_hash(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace cim
