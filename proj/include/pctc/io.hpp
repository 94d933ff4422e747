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

#ifndef PCTC_IO_HPP_
#define PCTC_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "pctc/error.hpp"

namespace pctc {

// All binary payloads are little-endian 64-bit, independent of host order.

inline void write_le_u64(std::ostream& out, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = (v >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

inline std::uint64_t read_le_u64(std::istream& in, const std::string& what) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (in.gcount() != 8)
    throw IoError("truncated input while reading " + what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

inline void write_le_double(std::ostream& out, double v) {
  write_le_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline double read_le_double(std::istream& in, const std::string& what) {
  return std::bit_cast<double>(read_le_u64(in, what));
}

}  // namespace pctc

#endif  // PCTC_IO_HPP_
