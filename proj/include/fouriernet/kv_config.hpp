#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace fouriernet {

// key=value text: one pair per line, '#' starts a comment, blank lines are
// skipped, whitespace around keys and values is trimmed.
class KvConfig {
 public:
  static KvConfig parse(std::string_view text);
  static KvConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;  // comma separated
  std::vector<int> get_ints(const std::string& key) const;        // comma separated

  // Throws ConfigError naming the first key not in `known`.
  void require_known(const std::set<std::string>& known) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  // Canonical text form, keys sorted.
  std::string to_string() const;

 private:
  std::map<std::string, std::string> values_;
};

int parse_int(std::string_view text, const std::string& what);
std::uint64_t parse_u64(std::string_view text, const std::string& what);
double parse_double(std::string_view text, const std::string& what);

}  // namespace fouriernet
