#include "fouriernet/kv_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "fouriernet/error.hpp"

namespace fouriernet {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename V>
V parse_number(std::string_view text, const std::string& what) {
  text = trim(text);
  V value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError(what + ": cannot parse '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto comma = s.find(',');
    parts.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return parts;
}

}  // namespace

int parse_int(std::string_view text, const std::string& what) { return parse_number<int>(text, what); }
std::uint64_t parse_u64(std::string_view text, const std::string& what) {
  return parse_number<std::uint64_t>(text, what);
}
double parse_double(std::string_view text, const std::string& what) { return parse_number<double>(text, what); }

KvConfig KvConfig::parse(std::string_view text) {
  KvConfig config;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (config.has(key)) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key " + key);
    config.values_[key] = std::string(trim(line.substr(eq + 1)));
  }
  return config;
}

KvConfig KvConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

const std::string& KvConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key " + key);
  return it->second;
}

int KvConfig::get_int(const std::string& key, int fallback) const {
  return has(key) ? parse_int(get(key), key) : fallback;
}

std::uint64_t KvConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? parse_u64(get(key), key) : fallback;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? parse_double(get(key), key) : fallback;
}

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

std::vector<double> KvConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  if (!has(key) || get(key).empty()) return out;
  for (auto part : split_commas(get(key))) out.push_back(parse_double(part, key));
  return out;
}

std::vector<int> KvConfig::get_ints(const std::string& key) const {
  std::vector<int> out;
  if (!has(key) || get(key).empty()) return out;
  for (auto part : split_commas(get(key))) out.push_back(parse_int(part, key));
  return out;
}

void KvConfig::require_known(const std::set<std::string>& known) const {
  for (const auto& [key, value] : values_) {
    if (!known.count(key)) throw ConfigError("unknown config key " + key);
  }
}

std::string KvConfig::to_string() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + "=" + value + "\n";
  return out;
}

}  // namespace fouriernet
