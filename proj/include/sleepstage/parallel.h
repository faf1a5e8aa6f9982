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

#ifndef SLEEPSTAGE_PARALLEL_H_
#define SLEEPSTAGE_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sleepstage {

// Runs fn(i) for every i in [0, n) on up to `workers` threads. Work items are
// handed out in blocks from a shared counter, so any item may run on any
// thread; callers must write results to disjoint, index-addressed slots and
// merge afterwards in index order. The first exception (by item index) is
// rethrown on the calling thread after all threads join.
template <typename Fn>
void ParallelFor(std::size_t n, int workers, Fn&& fn, std::size_t block = 1) {
  if (n == 0) return;
  block = std::max<std::size_t>(block, 1);
  const std::size_t num_blocks = (n + block - 1) / block;
  const std::size_t threads = std::min<std::size_t>(
      static_cast<std::size_t>(std::max(workers, 1)), num_blocks);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mu;
  std::exception_ptr error;
  std::size_t error_index = n;

  auto run = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= num_blocks) return;
      const std::size_t begin = b * block;
      const std::size_t end = std::min(n, begin + block);
      for (std::size_t i = begin; i < end; ++i) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (i < error_index) {
            error_index = i;
            error = std::current_exception();
          }
          break;
        }
      }
    }
  };

  {
    std::vector<std::jthread> pool;
    pool.reserve(threads - 1);
    for (std::size_t t = 0; t + 1 < threads; ++t) pool.emplace_back(run);
    run();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace sleepstage

#endif  // SLEEPSTAGE_PARALLEL_H_
