#pragma once

#include <cstdint>
#include <string>

#include "config.hpp"

namespace rnlcli {

// Each command consumes its config keys (unknown keys are rejected), writes
// its artifacts plus manifest.json under out_dir, and returns the process
// exit code: 0 ok, 3 property violation. Config problems throw ConfigError
// (exit 2) and numeric failures rnl::NumericError (exit 4); main maps them.
int cmd_gradcheck(const ConfigMap& cfg, const std::string& out_dir, std::uint64_t seed);
int cmd_regime(const ConfigMap& cfg, const std::string& out_dir, std::uint64_t seed);
int cmd_bounds(const ConfigMap& cfg, const std::string& out_dir, std::uint64_t seed);
int cmd_train(const ConfigMap& cfg, const std::string& out_dir, std::uint64_t seed);
int cmd_levelset(const ConfigMap& cfg, const std::string& out_dir, std::uint64_t seed);

} // namespace rnlcli
