#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ramp {

/// Flat key-value configuration.
///
/// File syntax: one `key = value` per line, `#` starts a comment, keys are
/// dotted (`planner.alpha`). Lists are comma separated. Unknown keys are kept
/// so that callers can report them.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::filesystem::path& path);
  static Config from_string(const std::string& text);

  bool contains(const std::string& key) const;
  void set(const std::string& key, std::string value);

  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_doubles(const std::string& key,
                                  const std::vector<double>& fallback) const;

  /// Keys that were never read through a getter.
  std::vector<std::string> unused_keys() const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  const std::string* find(const std::string& key) const;

  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> used_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ramp
