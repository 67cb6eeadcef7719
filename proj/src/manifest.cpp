#include "charprobe/manifest.hpp"

#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "charprobe/error.hpp"
#include "charprobe/rng.hpp"

#ifndef CHARPROBE_VERSION
#define CHARPROBE_VERSION "0.0.0"
#endif

namespace charprobe {

std::string iso8601_utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

std::string hash_hex(uint64_t value) {
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << value;
    return out.str();
}

RunManifest make_manifest(const std::vector<std::string>& argv,
                          std::optional<uint64_t> seed,
                          const std::vector<std::string>& input_paths) {
    RunManifest manifest;
    std::ostringstream cmd;
    for (size_t i = 0; i < argv.size(); ++i) {
        if (i) cmd << ' ';
        cmd << argv[i];
    }
    manifest.command_line = cmd.str();
    manifest.global_seed = seed;
    for (const auto& path : input_paths)
        manifest.input_hashes[path] = hash_hex(fnv1a64_file(path));
    manifest.tool_version = CHARPROBE_VERSION;
    manifest.timestamp = iso8601_utc_now();
    return manifest;
}

void write_manifest(const RunManifest& manifest, const std::string& out_dir) {
    nlohmann::json j;
    j["command_line"] = manifest.command_line;
    if (manifest.global_seed)
        j["global_seed"] = *manifest.global_seed;
    else
        j["global_seed"] = nullptr;
    j["input_hashes"] = manifest.input_hashes;
    j["tool_version"] = manifest.tool_version;
    j["timestamp"] = manifest.timestamp;

    std::string path = out_dir + "/manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open manifest for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw DataError("I/O failure writing manifest: " + path);
}

RunManifest read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open manifest: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed manifest " + path + ": " + e.what());
    }
    RunManifest manifest;
    manifest.command_line = j.value("command_line", "");
    if (j.contains("global_seed") && !j["global_seed"].is_null())
        manifest.global_seed = j["global_seed"].get<uint64_t>();
    if (j.contains("input_hashes"))
        manifest.input_hashes =
            j["input_hashes"].get<std::map<std::string, std::string>>();
    manifest.tool_version = j.value("tool_version", "");
    manifest.timestamp = j.value("timestamp", "");
    return manifest;
}

} // namespace charprobe
