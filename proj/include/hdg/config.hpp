#pragma once

#include <map>
#include <string>
#include <vector>

namespace hdg {

/// Flat key = value configuration with dotted keys ([section] headers become
/// prefixes). Type and unknown-key errors accumulate instead of throwing so a
/// run reports every problem at once; unknown keys get a nearest-match hint.
class Config {
public:
  static Config load(const std::string& path);
  static Config from_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& def = "");
  double get_double(const std::string& key, double def);
  int get_int(const std::string& key, int def);
  bool get_bool(const std::string& key, bool def);

  /// call after all getters: flags keys present in the file but never
  /// requested, suggesting the closest requested key
  void finalize();
  bool ok() const { return errors_.empty(); }
  const std::vector<std::string>& errors() const { return errors_; }
  std::string error_report() const;

private:
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> touched_;
  std::vector<std::string> known_;
  std::vector<std::string> errors_;
  std::string origin_;

  const std::string* lookup(const std::string& key);
};

/// Levenshtein edit distance (for the nearest-key hints)
int edit_distance(const std::string& a, const std::string& b);

} // namespace hdg
