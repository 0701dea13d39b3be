#include "hdg/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hdg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

} // namespace

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str(), path);
}

Config Config::from_string(const std::string& text, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        c.errors_.push_back(origin + ":" + std::to_string(lineno) + ": unterminated section");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      c.errors_.push_back(origin + ":" + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    if (key.empty()) {
      c.errors_.push_back(origin + ":" + std::to_string(lineno) + ": empty key");
      continue;
    }
    if (c.values_.count(key))
      c.errors_.push_back(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    c.values_[key] = trim(line.substr(eq + 1));
    c.touched_[key] = false;
  }
  return c;
}

const std::string* Config::lookup(const std::string& key) {
  known_.push_back(key);
  const auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  touched_[key] = true;
  return &it->second;
}

std::string Config::get_string(const std::string& key, const std::string& def) {
  const std::string* v = lookup(key);
  return v ? *v : def;
}

double Config::get_double(const std::string& key, double def) {
  const std::string* v = lookup(key);
  if (!v) return def;
  try {
    size_t pos = 0;
    const double d = std::stod(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    errors_.push_back(origin_ + ": key '" + key + "': expected a number, got '" + *v + "'");
    return def;
  }
}

int Config::get_int(const std::string& key, int def) {
  const std::string* v = lookup(key);
  if (!v) return def;
  try {
    size_t pos = 0;
    const int i = std::stoi(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("");
    return i;
  } catch (const std::exception&) {
    errors_.push_back(origin_ + ": key '" + key + "': expected an integer, got '" + *v + "'");
    return def;
  }
}

bool Config::get_bool(const std::string& key, bool def) {
  const std::string* v = lookup(key);
  if (!v) return def;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  errors_.push_back(origin_ + ": key '" + key + "': expected a boolean, got '" + *v + "'");
  return def;
}

void Config::finalize() {
  for (const auto& [key, used] : touched_) {
    if (used) continue;
    std::string best;
    int best_d = 1 << 30;
    for (const auto& k : known_) {
      const int d = edit_distance(key, k);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    std::string msg = origin_ + ": unknown key '" + key + "'";
    if (!best.empty() && best_d <= std::max<int>(2, static_cast<int>(key.size()) / 3))
      msg += " (did you mean '" + best + "'?)";
    errors_.push_back(msg);
  }
}

std::string Config::error_report() const {
  std::string out;
  for (const auto& e : errors_) out += e + "\n";
  return out;
}

int edit_distance(const std::string& a, const std::string& b) {
  const int n = static_cast<int>(a.size()), m = static_cast<int>(b.size());
  std::vector<int> row(m + 1);
  for (int j = 0; j <= m; ++j) row[j] = j;
  for (int i = 1; i <= n; ++i) {
    int diag = row[0];
    row[0] = i;
    for (int j = 1; j <= m; ++j) {
      const int tmp = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = tmp;
    }
  }
  return row[m];
}

} // namespace hdg
