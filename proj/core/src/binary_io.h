// Copyright 2026 The dpcdr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Little-endian primitive encoding shared by the binary file formats.

#ifndef DPCDR_SRC_BINARY_IO_H_
#define DPCDR_SRC_BINARY_IO_H_

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "dpcdr/error.h"

namespace dpcdr::binary {

inline void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes;
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  out.write(bytes.data(), 8);
}

inline void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> bytes;
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  out.write(bytes.data(), 4);
}

inline void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  Reader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  void bytes(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw IoError(name_ + ": unexpected end of file");
    }
  }
  std::uint64_t u64() {
    std::array<unsigned char, 8> b;
    bytes(reinterpret_cast<char*>(b.data()), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
    return v;
  }
  std::uint32_t u32() {
    std::array<unsigned char, 4> b;
    bytes(reinterpret_cast<char*>(b.data()), 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  const std::string& name() const { return name_; }

 private:
  std::istream& in_;
  std::string name_;
};

}  // namespace dpcdr::binary

#endif  // DPCDR_SRC_BINARY_IO_H_
