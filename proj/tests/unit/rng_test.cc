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
#include "dpcdr/rng.h"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

namespace dpcdr {
namespace {

TEST(Philox, KnownAnswerZero) {
  const PhiloxCounter out = philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const PhiloxCounter out = philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                          {0xffffffff, 0xffffffff});
  EXPECT_EQ(out, (PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPiDigits) {
  const PhiloxCounter out = philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                          {0xa4093822, 0x299f31d0});
  EXPECT_EQ(out, (PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, SameSeedSameSequence) {
  RandomStream a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, SubstreamIgnoresParentPosition) {
  RandomStream a(9);
  const RandomStream fresh = a.substream(3);
  for (int i = 0; i < 17; ++i) a.next_u32();
  RandomStream x = fresh;
  RandomStream y = a.substream(3);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(x.next_u64(), y.next_u64());
}

TEST(RandomStream, SubstreamsDiffer) {
  const RandomStream root(1);
  std::set<std::uint64_t> firsts;
  for (std::uint64_t id = 0; id < 64; ++id) {
    RandomStream s = root.substream(id);
    firsts.insert(s.next_u64());
  }
  EXPECT_EQ(firsts.size(), 64u);
}

TEST(RandomStream, UniformRanges) {
  RandomStream s(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const double o = s.uniform_open();
    EXPECT_GT(o, 0.0);
    EXPECT_LT(o, 1.0);
    EXPECT_LT(s.below(7), 7u);
  }
}

TEST(RandomStream, BelowIsRoughlyUniform) {
  RandomStream s(11);
  std::array<int, 6> counts{};
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[s.below(6)];
  // Each count is Binomial(n, 1/6); sd is about 91.
  for (int c : counts) EXPECT_NEAR(c, n / 6, 500);
}

TEST(RandomStream, NormalMoments) {
  RandomStream s(3);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.015);
}

TEST(RandomStream, SignsAreBalanced) {
  RandomStream s(8);
  int plus = 0;
  for (int i = 0; i < 10000; ++i) {
    const double v = s.sign();
    EXPECT_TRUE(v == 1.0 || v == -1.0);
    plus += v > 0;
  }
  EXPECT_NEAR(plus, 5000, 250);
}

}  // namespace
}  // namespace dpcdr
