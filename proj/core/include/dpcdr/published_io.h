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

// Published-matrix file format (all integers and floats little-endian):
//
//   offset  size  field
//   0       8     magic "DPCDRPUB"
//   8       4     u32 format_version (= 1)
//   12      4     u32 transform_kind (0 = jlt, 1 = sjlt)
//   16      8     u64 m (users)
//   24      8     u64 n1 (source items)
//   32      8     u64 n1_prime
//   40      8     u64 padded_n
//   48      8     u64 seed
//   56      8     f64 epsilon
//   64      8     f64 delta
//   72      8     f64 eta
//   80      8     f64 mu
//   88      8     f64 q
//   96      8     f64 w
//   104     8*m*n1_prime  f64 values, row-major
//
// User ids, the noise calibration and warnings live in a JSON sidecar
// "<path>.meta.json".

#ifndef DPCDR_PUBLISHED_IO_H_
#define DPCDR_PUBLISHED_IO_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "dpcdr/publish.h"

namespace dpcdr {

inline constexpr std::uint32_t kPublishedFormatVersion = 1;
inline constexpr std::size_t kPublishedHeaderBytes = 104;

void write_published_binary(std::ostream& out, const PublishedMatrix& published);
PublishedMatrix read_published_binary(std::istream& in, const std::string& name = "<stream>");

// Writes the binary file and its sidecar.
void save_published(const std::string& path, const PublishedMatrix& published);
// Reads the binary file and, if present, the sidecar (user ids default to
// "u0", "u1", ... otherwise).
PublishedMatrix load_published(const std::string& path);

// CSV export: '#'-prefixed key=value header lines followed by one row per
// user with %.17g values.
void write_published_csv(std::ostream& out, const PublishedMatrix& published);

std::string sidecar_path(const std::string& path);

}  // namespace dpcdr

#endif  // DPCDR_PUBLISHED_IO_H_
