#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rnlcli {

// Record of one CLI run: enough to rerun it and to account for every file it
// wrote. Artifact paths are relative to the output directory.
struct RunManifest {
    std::string command;
    std::string config_text;
    std::uint64_t config_hash = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> artifacts;
    std::string version;

    std::string to_json() const;
};

// Creates the directory if needed; throws on I/O failure.
void write_text_file(const std::string& path, const std::string& content);

// Writes <out_dir>/manifest.json.
void write_manifest(const RunManifest& m, const std::string& out_dir);

} // namespace rnlcli
