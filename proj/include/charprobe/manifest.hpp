#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace charprobe {

// Provenance record written once per artifact directory. Outputs themselves
// are byte-reproducible from the recorded command and seed; the timestamp is
// informational only.
struct RunManifest {
    std::string command_line;
    std::optional<uint64_t> global_seed;
    std::map<std::string, std::string> input_hashes; // path -> fnv1a64 hex
    std::string tool_version;
    std::string timestamp; // ISO-8601 UTC
};

std::string iso8601_utc_now();
std::string hash_hex(uint64_t value);

RunManifest make_manifest(const std::vector<std::string>& argv,
                          std::optional<uint64_t> seed,
                          const std::vector<std::string>& input_paths);

// Writes <out_dir>/manifest.json.
void write_manifest(const RunManifest& manifest, const std::string& out_dir);
RunManifest read_manifest(const std::string& path);

} // namespace charprobe
