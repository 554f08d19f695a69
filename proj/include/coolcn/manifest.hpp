#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace coolcn {

// Reproducibility record written next to every run's outputs: the resolved
// config, the seeding tree, and content hashes of every emitted file.
struct RunManifest {
    std::string command;
    std::string config_json;  // resolved, defaults materialized
    std::uint64_t master_seed = 0;
    std::vector<std::pair<std::string, std::uint64_t>> child_seeds;
    std::vector<std::pair<std::string, std::uint64_t>> outputs;  // (file, hash)
    std::string version = "coolcn 0.1.0";
};

// Records the file and its FNV-1a content hash.
void record_output(RunManifest& m, const std::string& filename,
                   const std::string& content);
void record_child_seed(RunManifest& m, const std::string& stream);

std::string serialize_manifest(const RunManifest& m);

// Writes content to dir/filename (LF endings as-is) and records it.
void emit_file(RunManifest& m, const std::string& dir,
               const std::string& filename, const std::string& content);

}  // namespace coolcn
