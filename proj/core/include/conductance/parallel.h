/*
 * Copyright 2026 The Conductance Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CONDUCTANCE_PARALLEL_H_
#define CONDUCTANCE_PARALLEL_H_

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace conductance {

// Runs fn(i) for i in [0, count) on up to `threads` workers, each taking a
// contiguous block. Callers write results into slot i and reduce afterwards
// in index order, so output does not depend on the thread count. The first
// exception thrown by any worker is rethrown.
template <typename Fn>
void ParallelFor(int64_t count, int threads, Fn&& fn) {
  const int64_t workers = std::clamp<int64_t>(threads, 1, std::max<int64_t>(count, 1));
  if (workers <= 1) {
    for (int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  {
    std::vector<std::jthread> pool;
    const int64_t block = (count + workers - 1) / workers;
    for (int64_t w = 0; w < workers; ++w) {
      const int64_t begin = w * block;
      const int64_t end = std::min(count, begin + block);
      if (begin >= end) break;
      pool.emplace_back([&, begin, end] {
        try {
          for (int64_t i = begin; i < end; ++i) fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!error) error = std::current_exception();
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace conductance

#endif  // CONDUCTANCE_PARALLEL_H_
