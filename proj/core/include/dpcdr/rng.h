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

#ifndef DPCDR_RNG_H_
#define DPCDR_RNG_H_

#include <array>
#include <cstdint>

namespace dpcdr {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

// Philox4x32 with 10 rounds (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3"). Pure function of (counter, key).
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

// Well-known substream identifiers. Each random draw inside a publish run
// consumes its own substream so that adding a draw never shifts another.
enum class StreamTag : std::uint64_t {
  kSigns = 1,          // D diagonal of the sparse-aware transform
  kSparseProjection,   // P of the sparse-aware transform
  kGaussianProjection, // dense Gaussian JLT matrix
  kInputMatrix,        // random test matrices in the verification harness
  kTrials,             // per-trial streams in the verification harness
  kShuffle,
  kNegatives,
  kInit,
  kSplit,
  kSynth,
};

// Counter-based random stream. The 64-bit seed is the Philox key; the
// counter's upper half carries a stream id and the lower half the block
// index. Copying a stream copies its position; substreams are independent
// of the parent's position.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  RandomStream substream(std::uint64_t id) const;
  RandomStream substream(StreamTag tag) const {
    return substream(static_cast<std::uint64_t>(tag));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1).
  double uniform_open();
  // Standard normal (Box-Muller; the second variate is cached).
  double normal();
  bool bernoulli(double p);
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  // +1 or -1 with equal probability.
  double sign();

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  int buffered_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// SplitMix64 finalizer; used to derive stream ids.
std::uint64_t mix64(std::uint64_t x);

}  // namespace dpcdr

#endif  // DPCDR_RNG_H_
