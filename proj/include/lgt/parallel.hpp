#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace lgt {

// Monte Carlo work is split into fixed batches of this many samples, each
// with its own derived seed, so results do not depend on the worker count.
inline constexpr std::size_t kBatchSize = 4096;

// Worker threads: hardware concurrency, capped by LTS_THREADS when set.
unsigned worker_count();

// SplitMix64 mixing of (master, stream, index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

// Calls fn(i) for i in [0, count) on up to worker_count() threads. The first
// exception thrown by any call is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

// Welford accumulator; merge() combines batches in a fixed order.
struct RunningStats {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }

  void merge(const RunningStats& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(count), m = static_cast<double>(o.count);
    const double d = o.mean - mean;
    mean += d * m / (n + m);
    m2 += o.m2 + d * d * n * m / (n + m);
    count += o.count;
  }

  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double std_error() const { return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0; }
};

}  // namespace lgt
