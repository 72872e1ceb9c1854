// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include "isomedia/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace isomedia {

int default_thread_count() {
  if (const char* env = std::getenv("ISOMEDIA_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_chunks(std::size_t n, int threads,
                     const std::function<void(int chunk, std::size_t begin, std::size_t end)>& fn) {
  const auto t = static_cast<std::size_t>(std::max(1, threads));
  auto bounds = [&](std::size_t k) { return n * k / t; };
  if (t == 1 || n < 2) {
    fn(0, 0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(t);
  for (std::size_t k = 1; k < t; ++k)
    pool.emplace_back([&, k] {
      try {
        fn(static_cast<int>(k), bounds(k), bounds(k + 1));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  try {
    fn(0, bounds(0), bounds(1));
  } catch (...) {
    errors[0] = std::current_exception();
  }
  for (std::thread& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace isomedia
