#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace whow {

// Flat "key = value" run configuration ('#' comments, blank lines ignored).
// Command-line flags override file values; every consumer states a default,
// so an empty config is always valid.
class RunConfig {
 public:
  RunConfig() = default;
  static RunConfig load(const std::filesystem::path& path);  // throws on parse error
  static RunConfig parse(const std::string& text, const std::string& origin = "<string>");

  void set(const std::string& key, std::string value);
  bool has(const std::string& key) const;

  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;        // throws on non-numeric
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;     // true/false/1/0/yes/no

  // Keys in insertion-independent (sorted) order, for manifests.
  std::vector<std::pair<std::string, std::string>> items() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace whow
