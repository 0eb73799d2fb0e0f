#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "lgt/parallel.hpp"

using namespace lgt;

TEST_CASE("derive_seed separates streams and batches") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 8; ++s)
    for (std::uint64_t b = 0; b < 64; ++b) seen.insert(derive_seed(7, s, b));
  CHECK(seen.size() == 8 * 64);
  CHECK(derive_seed(7, 1, 2) == derive_seed(7, 1, 2));
  CHECK(derive_seed(7, 1, 2) != derive_seed(8, 1, 2));
}

TEST_CASE("merged running stats equal one sequential pass") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(1.5, 2.0);
  std::vector<double> xs(10001);
  for (auto& x : xs) x = normal(rng);

  RunningStats all;
  for (double x : xs) all.add(x);

  std::vector<RunningStats> parts(7);
  for (std::size_t i = 0; i < xs.size(); ++i) parts[i * parts.size() / xs.size()].add(xs[i]);
  RunningStats merged;
  for (const auto& p : parts) merged.merge(p);

  CHECK(merged.count == all.count);
  CHECK(merged.mean == doctest::Approx(all.mean).epsilon(1e-12));
  CHECK(merged.variance() == doctest::Approx(all.variance()).epsilon(1e-12));

  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size() - 1);
  CHECK(all.mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(all.variance() == doctest::Approx(var).epsilon(1e-10));
}

TEST_CASE("empty and single-sample stats") {
  RunningStats s;
  CHECK(s.std_error() == 0.0);
  s.add(4.0);
  CHECK(s.variance() == 0.0);
  RunningStats e;
  s.merge(e);
  CHECK(s.count == 1);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);

  CHECK_THROWS_AS(parallel_for(50, [](std::size_t i) {
                    if (i == 17) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}

TEST_CASE("LTS_THREADS caps the worker count") {
  setenv("LTS_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  setenv("LTS_THREADS", "garbage", 1);
  CHECK(worker_count() >= 1);
  unsetenv("LTS_THREADS");
}
