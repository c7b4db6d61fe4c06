#include "nad/cli/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "nad/error.hpp"

namespace nad::cli {

nlohmann::json to_json(const RunManifest& m) {
    return {{"tool", "nad"},
            {"version", kToolVersion},
            {"command", m.command},
            {"argv", m.argv},
            {"cwd", m.cwd},
            {"config", m.config},
            {"config_hash", m.config_hash},
            {"seed", m.seed},
            {"inputs", m.inputs},
            {"checkpoint_sha256", m.checkpoint_sha256},
            {"outputs", m.outputs},
            {"started_at", m.started_at},
            {"finished_at", m.finished_at}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
    try {
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.argv = j.at("argv").get<std::vector<std::string>>();
        m.cwd = j.at("cwd").get<std::string>();
        m.config = j.at("config");
        m.config_hash = j.at("config_hash").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
        m.checkpoint_sha256 = j.at("checkpoint_sha256").get<std::string>();
        m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
        m.started_at = j.at("started_at").get<std::string>();
        m.finished_at = j.at("finished_at").get<std::string>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::validation_failed, std::string("malformed run manifest: ") + e.what());
    }
}

RunManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open manifest " + path.string());
    try {
        return manifest_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::validation_failed, "manifest " + path.string() + " is not valid JSON: " + e.what());
    }
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
    out << to_json(m).dump(2) << '\n';
    if (!out) throw Error(Errc::io_error, "failed writing " + path.string());
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace nad::cli
