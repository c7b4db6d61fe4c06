#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace nad::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
    std::string command;
    std::vector<std::string> argv;  // arguments after the program name
    std::string cwd;
    nlohmann::json config;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> inputs;   // path -> sha256
    std::string checkpoint_sha256;               // empty when no checkpoint is involved
    std::map<std::string, std::string> outputs;  // path relative to the output root -> sha256
    std::string started_at;
    std::string finished_at;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);
RunManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const RunManifest& m);

// UTC, second resolution, e.g. 2024-01-31T12:00:00Z.
std::string utc_timestamp();

}  // namespace nad::cli
