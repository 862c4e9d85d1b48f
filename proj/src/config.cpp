#include "snsm/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "snsm/io.hpp"

namespace snsm::config {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigError("key '" + key + "': cannot parse '" + text + "' as a number");
  }
  return v;
}

long parse_long(const std::string& key, const std::string& text) {
  long v = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigError("key '" + key + "': cannot parse '" + text + "' as an integer");
  }
  return v;
}

}  // namespace

KeyValues parse_text(const std::string& text, const std::string& source) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    }
    if (kv.count(key)) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" +
                        key + "'");
    }
    kv[key] = value;
  }
  return kv;
}

KeyValues parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path.string());
}

void check_keys(const KeyValues& kv, const Schema& schema) {
  for (const auto& key : schema.required) {
    if (!kv.count(key)) throw ConfigError("missing required key '" + key + "'");
  }
  for (const auto& [key, value] : kv) {
    const bool known =
        std::find(schema.required.begin(), schema.required.end(), key) !=
            schema.required.end() ||
        std::find(schema.optional.begin(), schema.optional.end(), key) !=
            schema.optional.end();
    if (!known) throw ConfigError("unknown key '" + key + "'");
  }
}

bool has(const KeyValues& kv, const std::string& key) { return kv.count(key) > 0; }

std::string get_string(const KeyValues& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

std::string get_string(const KeyValues& kv, const std::string& key,
                       const std::string& fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

double get_double(const KeyValues& kv, const std::string& key) {
  return parse_double(key, get_string(kv, key));
}

double get_double(const KeyValues& kv, const std::string& key, double fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : parse_double(key, it->second);
}

long get_long(const KeyValues& kv, const std::string& key) {
  return parse_long(key, get_string(kv, key));
}

long get_long(const KeyValues& kv, const std::string& key, long fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : parse_long(key, it->second);
}

std::uint64_t get_u64(const KeyValues& kv, const std::string& key,
                      std::uint64_t fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  std::uint64_t v = 0;
  const char* end = it->second.data() + it->second.size();
  const auto res = std::from_chars(it->second.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigError("key '" + key + "': cannot parse '" + it->second +
                      "' as an unsigned integer");
  }
  return v;
}

bool get_bool(const KeyValues& kv, const std::string& key, bool fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + it->second + "'");
}

std::vector<int> get_int_list(const KeyValues& kv, const std::string& key) {
  const std::string text = get_string(kv, key);
  std::vector<int> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("key '" + key + "': empty list element");
    out.push_back(static_cast<int>(parse_long(key, item)));
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

LearningSchedule parse_schedule(const std::string& text, double final_eta) {
  LearningSchedule schedule;
  schedule.final_eta = final_eta;
  if (!trim(text).empty()) {
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
      item = trim(item);
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        throw ConfigError("schedule segment '" + item + "': expected steps:eta");
      }
      LearningSchedule::Segment seg;
      seg.steps = parse_long("schedule", trim(item.substr(0, colon)));
      seg.eta = parse_double("schedule", trim(item.substr(colon + 1)));
      schedule.segments.push_back(seg);
    }
  }
  schedule.validate();
  return schedule;
}

void write_resolved(const KeyValues& kv, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  for (const auto& [key, value] : kv) out << key << " = " << value << '\n';
  if (!out) throw Error("short write to " + path.string());
}

}  // namespace snsm::config
