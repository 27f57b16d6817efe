/*
 * Copyright 2026 The namc Authors.
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

#ifndef NAMC_RUNTIME_H_
#define NAMC_RUNTIME_H_

#include <chrono>
#include <functional>
#include <optional>

namespace namc {

// Worker count after applying the NAMC_THREADS cap (if set and positive).
int EffectiveWorkers(int requested);

// Runs fn(0) ... fn(count - 1) on up to `workers` threads. If any call
// throws, the exception of the lowest index is rethrown after all workers
// have joined.
void ParallelFor(int count, int workers, const std::function<void(int)>& fn);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Optional wall-clock limit shared by a pipeline run.
class Deadline {
 public:
  Deadline() = default;
  static Deadline AfterSeconds(double seconds);

  bool expired() const;
  // Throws TimeoutError naming `what` once expired.
  void Check(const char* what) const;

 private:
  std::optional<std::chrono::steady_clock::time_point> at_;
};

}  // namespace namc

#endif  // NAMC_RUNTIME_H_
