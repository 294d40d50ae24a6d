#include "fermion/random.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "fermion/error.hpp"

namespace fermion::random {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t root, std::uint64_t stream) {
  std::uint64_t state = root;
  const std::uint64_t mixed_root = splitmix64(state);
  state = mixed_root ^ (stream * 0xd1b54a32d192ed03ULL);
  return splitmix64(state);
}

RandomStream::RandomStream(std::uint64_t root, std::uint64_t stream)
    : root_(root), stream_(stream), engine_(stream_seed(root, stream)) {}

double RandomStream::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::gamma(double shape) {
  if (!(shape > 0.0)) throw DomainError("gamma: shape must be positive");
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

double RandomStream::beta_one(double t) {
  if (!(t > 0.0)) throw DomainError("beta_one: t must be positive");
  return -std::expm1(std::log(uniform()) / t);
}

long RandomStream::poisson(double mean) {
  if (!(mean >= 0.0)) throw DomainError("poisson: mean must be nonnegative");
  if (mean == 0.0) return 0;
  std::poisson_distribution<long> dist(mean);
  return dist(engine_);
}

int thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FERMION_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const int workers = std::max(1, std::min<int>(thread_count(threads), static_cast<int>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace fermion::random
