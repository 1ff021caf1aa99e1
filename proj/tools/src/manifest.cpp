#include "manifest.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rnlcli {

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    std::ostringstream hex;
    hex << std::hex << config_hash;
    j["config_hash"] = hex.str();
    j["config"] = config_text;
    j["seeds"] = seeds;
    j["artifacts"] = artifacts;
    j["version"] = version;
    return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("short write to '" + path + "'");
}

void write_manifest(const RunManifest& m, const std::string& out_dir) {
    write_text_file(out_dir + "/manifest.json", m.to_json());
}

} // namespace rnlcli
