#include "coolcn/manifest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "coolcn/rng.hpp"

namespace coolcn {

namespace {
std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(v));
    return buf;
}
}  // namespace

void record_output(RunManifest& m, const std::string& filename,
                   const std::string& content) {
    m.outputs.emplace_back(filename, fnv1a(content));
}

void record_child_seed(RunManifest& m, const std::string& stream) {
    m.child_seeds.emplace_back(stream, child_seed(m.master_seed, stream));
}

std::string serialize_manifest(const RunManifest& m) {
    nlohmann::json j;
    j["version"] = m.version;
    j["command"] = m.command;
    j["config"] = nlohmann::json::parse(m.config_json);
    j["master_seed"] = m.master_seed;
    nlohmann::json seeds = nlohmann::json::object();
    for (const auto& [name, s] : m.child_seeds) seeds[name] = hex64(s);
    j["child_seeds"] = seeds;
    nlohmann::json outs = nlohmann::json::object();
    for (const auto& [name, h] : m.outputs) outs[name] = hex64(h);
    j["outputs"] = outs;
    return j.dump(2) + "\n";
}

void emit_file(RunManifest& m, const std::string& dir,
               const std::string& filename, const std::string& content) {
    std::filesystem::create_directories(dir);
    auto path = std::filesystem::path(dir) / filename;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
    record_output(m, filename, content);
}

}  // namespace coolcn
