// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace bitwave {

/// Hardware concurrency, capped by the BITWAVE_THREADS environment variable
/// and by any active ScopedWorkerLimit.
std::size_t worker_count();

/// Caps worker_count() process-wide while alive. Limits nest; the innermost wins.
class ScopedWorkerLimit {
 public:
  explicit ScopedWorkerLimit(std::size_t limit);
  ~ScopedWorkerLimit();
  ScopedWorkerLimit(const ScopedWorkerLimit&) = delete;
  ScopedWorkerLimit& operator=(const ScopedWorkerLimit&) = delete;

 private:
  std::size_t previous_;
};

/// Splits [begin, end) into contiguous chunks and runs body(chunk_begin,
/// chunk_end) on up to worker_count() threads. Runs inline when one worker
/// suffices. The first exception thrown by a chunk is rethrown after all
/// chunks finish.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace bitwave
