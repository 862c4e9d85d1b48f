#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "snsm/config.hpp"

namespace snsm {

// Subcommand bodies. Each reads its schema-checked key set, writes its
// artifacts plus a resolved copy of the configuration into `out`, and throws
// on any failure; run_cli maps exceptions to exit codes.
void cmd_bench(config::KeyValues kv, const std::filesystem::path& out);
void cmd_train(config::KeyValues kv, const std::filesystem::path& out);
void cmd_features(config::KeyValues kv, const std::filesystem::path& out);
void cmd_tuning(config::KeyValues kv, const std::filesystem::path& out);
void cmd_oracle(config::KeyValues kv, const std::filesystem::path& out);

// Exit codes: 0 success, 1 usage/config/input-parse error, 2 numerical
// failure (divergence, broken invariants).
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args without argv[0]

}  // namespace snsm
