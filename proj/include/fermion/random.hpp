#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace fermion::random {

/// One SplitMix64 step; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed of stream `stream` under root seed `root`. Distinct streams are decorrelated by two
/// SplitMix64 finalizations, so stream i never depends on how many other streams exist.
std::uint64_t stream_seed(std::uint64_t root, std::uint64_t stream);

/// Per-task generator: mt19937_64 seeded from (root, stream).
class RandomStream {
 public:
  RandomStream(std::uint64_t root, std::uint64_t stream);

  /// Uniform on the open interval (0, 1).
  double uniform();
  double gamma(double shape);
  /// Beta(1, t) via 1 - U^{1/t}.
  double beta_one(double t);
  long poisson(double mean);

  std::uint64_t root() const { return root_; }
  std::uint64_t stream() const { return stream_; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t root_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

/// Thread count: `requested` if positive, else $FERMION_THREADS, else hardware concurrency.
int thread_count(int requested = 0);

/// Runs fn(i) for i in [0, count) on `threads` workers. Each index is processed exactly once,
/// so results written by index do not depend on the thread count.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace fermion::random
