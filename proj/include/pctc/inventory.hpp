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

#ifndef PCTC_INVENTORY_HPP_
#define PCTC_INVENTORY_HPP_

#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "pctc/error.hpp"

namespace pctc {

// The CTC blank; index 0 in every language inventory.
inline const std::string kBlankName = "∅";

// Ordered phone set of one language. phones[0] is always the blank.
struct PhoneInventory {
  std::string language_id;
  std::vector<std::string> phones;

  std::size_t size() const { return phones.size(); }

  int index_of(const std::string& name) const {
    for (std::size_t i = 0; i < phones.size(); ++i)
      if (phones[i] == name) return static_cast<int>(i);
    return -1;
  }

  void validate() const {
    if (phones.size() < 2)
      throw ConfigError("inventory for '" + language_id +
                        "': needs the blank plus at least one phone");
    if (phones[0] != kBlankName)
      throw ConfigError("inventory for '" + language_id +
                        "': entry 0 must be the blank " + kBlankName);
    std::unordered_map<std::string, int> seen;
    for (const auto& p : phones)
      if (++seen[p] > 1)
        throw ConfigError("inventory for '" + language_id +
                          "': duplicate phone name '" + p + "'");
  }
};

// One phone name per line; line 0 must be the blank.
inline PhoneInventory load_inventory(const std::string& path,
                                     const std::string& language_id) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open inventory file " + path);
  PhoneInventory inv;
  inv.language_id = language_id;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    inv.phones.push_back(line);
  }
  if (inv.phones.empty() || inv.phones[0] != kBlankName)
    throw IoError(path + ": line 0 must be the blank symbol " + kBlankName);
  inv.validate();
  return inv;
}

inline void save_inventory(const PhoneInventory& inv,
                           const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write inventory file " + path);
  for (const auto& p : inv.phones) out << p << "\n";
}

}  // namespace pctc

#endif  // PCTC_INVENTORY_HPP_
