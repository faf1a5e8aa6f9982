// Copyright 2026 The Sleepstage Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"
#include "sleepstage/parallel.h"

namespace sleepstage {
namespace {

TEST(ParallelForTest, VisitsEveryIndexOnce) {
  for (int workers : {1, 2, 3, 8}) {
    for (std::size_t block : {1u, 4u, 64u}) {
      std::vector<std::atomic<int>> hits(1001);
      ParallelFor(hits.size(), workers, [&](std::size_t i) { hits[i]++; }, block);
      for (const auto& h : hits) ASSERT_EQ(h.load(), 1);
    }
  }
}

TEST(ParallelForTest, EmptyRangeIsNoop) {
  bool called = false;
  ParallelFor(0, 4, [&](std::size_t) { called = true; });
  EXPECT_FALSE(called);
}

TEST(ParallelForTest, RethrowsLowestFailingIndex) {
  for (int workers : {1, 4}) {
    try {
      ParallelFor(100, workers, [](std::size_t i) {
        if (i == 37 || i == 80) throw std::runtime_error(std::to_string(i));
      });
      FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "37");
    }
  }
}

TEST(ParallelForTest, DisjointWritesAreDeterministic) {
  std::vector<double> a(5000), b(5000);
  auto fill = [](std::vector<double>& out) {
    return [&out](std::size_t i) { out[i] = static_cast<double>(i) * 0.5 + 1.0 / (1.0 + i); };
  };
  ParallelFor(a.size(), 1, fill(a));
  ParallelFor(b.size(), 7, fill(b), 13);
  EXPECT_EQ(a, b);
}

}  // namespace
}  // namespace sleepstage
