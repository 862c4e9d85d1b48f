#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "snsm/learning.hpp"
#include "snsm/types.hpp"

namespace snsm::config {

// Flat key = value text format.  '#' starts a comment, blank lines are
// skipped, duplicate keys are an error.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_text(const std::string& text, const std::string& source = "config");
KeyValues parse_file(const std::filesystem::path& path);

struct Schema {
  std::vector<std::string> required;
  std::vector<std::string> optional;
};

// Rejects unknown keys and missing required keys.
void check_keys(const KeyValues& kv, const Schema& schema);

bool has(const KeyValues& kv, const std::string& key);

std::string get_string(const KeyValues& kv, const std::string& key);
std::string get_string(const KeyValues& kv, const std::string& key,
                       const std::string& fallback);
double get_double(const KeyValues& kv, const std::string& key);
double get_double(const KeyValues& kv, const std::string& key, double fallback);
long get_long(const KeyValues& kv, const std::string& key);
long get_long(const KeyValues& kv, const std::string& key, long fallback);
std::uint64_t get_u64(const KeyValues& kv, const std::string& key,
                      std::uint64_t fallback);
bool get_bool(const KeyValues& kv, const std::string& key, bool fallback);
std::vector<int> get_int_list(const KeyValues& kv, const std::string& key);

// "10000:1e-3,90000:1e-5" -> segments; empty text means no segments.
LearningSchedule parse_schedule(const std::string& text, double final_eta);

// Every run copies its fully resolved configuration next to its outputs.
void write_resolved(const KeyValues& kv, const std::filesystem::path& path);

}  // namespace snsm::config
