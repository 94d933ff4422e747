/* Copyright 2026 The polyglot-ctc Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef PCTC_CONFIG_HPP_
#define PCTC_CONFIG_HPP_

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pctc/error.hpp"

namespace pctc {

// Plain-text key=value experiment configuration. '#' starts a comment,
// blank lines are ignored, keys are unique. Commands declare the keys
// they understand; anything else is rejected before any work starts.
class RunConfigFile {
 public:
  static RunConfigFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    RunConfigFile config;
    config.path_ = path;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (trim(line).empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(path + ":" + std::to_string(line_no) +
                          ": expected key=value, got '" + trim(line) + "'");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw ConfigError(path + ":" + std::to_string(line_no) +
                          ": empty key");
      if (config.values_.count(key))
        throw ConfigError(path + ":" + std::to_string(line_no) +
                          ": duplicate key '" + key + "'");
      config.values_[key] = value;
    }
    return config;
  }

  const std::string& path() const { return path_; }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
      throw ConfigError(path_ + ": missing required key '" + key + "'");
    return it->second;
  }
  std::string get_string(const std::string& key,
                         const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key) const {
    return parse_double(key, get_string(key));
  }
  double get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }

  std::uint64_t get_u64(const std::string& key) const {
    return parse_u64(key, get_string(key));
  }
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_u64(key) : fallback;
  }

  std::vector<std::string> get_list(const std::string& key) const {
    std::vector<std::string> out;
    std::istringstream ss(get_string(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    if (out.empty())
      throw ConfigError(path_ + ": key '" + key + "' has an empty list");
    return out;
  }

  std::vector<double> get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : get_list(key))
      out.push_back(parse_double(key, item));
    return out;
  }

  // Two whitespace-separated integers, e.g. "3 8".
  std::pair<std::uint64_t, std::uint64_t> get_range(
      const std::string& key) const {
    std::istringstream ss(get_string(key));
    std::uint64_t lo = 0, hi = 0;
    std::string extra;
    if (!(ss >> lo >> hi) || (ss >> extra))
      throw ConfigError(path_ + ": key '" + key +
                        "' must be two integers, got '" + get_string(key) +
                        "'");
    return {lo, hi};
  }

  // Every present key must be either in `exact` or start with one of the
  // `prefixes`; experiments should fail on typos, not ignore them.
  void reject_unknown_keys(const std::set<std::string>& exact,
                           const std::vector<std::string>& prefixes = {})
      const {
    for (const auto& [key, value] : values_) {
      if (exact.count(key)) continue;
      bool matched = false;
      for (const auto& prefix : prefixes)
        matched = matched || key.rfind(prefix, 0) == 0;
      if (!matched)
        throw ConfigError(path_ + ": unknown key '" + key + "'");
    }
  }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  static std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
  }

  double parse_double(const std::string& key, const std::string& value) const {
    try {
      std::size_t used = 0;
      double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(path_ + ": key '" + key + "' is not a number: '" +
                        value + "'");
    }
  }

  std::uint64_t parse_u64(const std::string& key,
                          const std::string& value) const {
    try {
      std::size_t used = 0;
      unsigned long long v = std::stoull(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(path_ + ": key '" + key +
                        "' is not a non-negative integer: '" + value + "'");
    }
  }

  std::string path_;
  std::map<std::string, std::string> values_;
};

}  // namespace pctc

#endif  // PCTC_CONFIG_HPP_
