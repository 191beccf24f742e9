// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/core/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace bitwave {

namespace {

std::atomic<std::size_t> g_limit{0};

}  // namespace

ScopedWorkerLimit::ScopedWorkerLimit(std::size_t limit) : previous_(g_limit.exchange(std::max<std::size_t>(limit, 1))) {}

ScopedWorkerLimit::~ScopedWorkerLimit() { g_limit.store(previous_); }

std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("BITWAVE_THREADS")) {
    try {
      const long v = std::stol(cap);
      if (v >= 1) n = std::min(n, static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      // ignore unparsable values
    }
  }
  if (const std::size_t limit = g_limit.load(); limit > 0) n = std::min(n, limit);
  return n;
}

void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t, std::size_t)>& body) {
  if (end <= begin) return;
  const std::size_t total = end - begin;
  const std::size_t workers = std::min(worker_count(), total);
  if (workers <= 1) {
    body(begin, end);
    return;
  }
  const std::size_t chunk = (total + workers - 1) / workers;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> threads;
    for (std::size_t start = begin; start < end; start += chunk)
      threads.emplace_back([&, start, stop = std::min(end, start + chunk)] {
        try {
          body(start, stop);
        } catch (...) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace bitwave
