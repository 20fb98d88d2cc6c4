#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace fracflow {

std::uint64_t splitmix64(std::uint64_t x);
// Seed of chunk c in a stream started from `seed`.
std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk);

// Samples are produced in fixed-size chunks, each with its own engine, so the
// output does not depend on how chunks are spread over worker threads.
inline constexpr std::size_t kChunkSize = 8192;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }
    // Uniform on the open interval (0,1).
    double uniform() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }
    double exponential();
    double normal();
    std::uint64_t poisson(double mean);
    double gamma(double shape);
    // +1 with probability p, -1 otherwise.
    int rademacher(double p) { return uniform() < p ? 1 : -1; }

private:
    std::mt19937_64 eng_;
};

// Worker count used when a call passes 0. Initialized from FRACFLOW_THREADS,
// falling back to hardware concurrency.
std::size_t default_threads();
void set_default_threads(std::size_t n);

using ChunkFn = std::function<void(Rng& rng, std::size_t begin, std::size_t end)>;
// Runs fn over [0,n) in chunks of kChunkSize; chunk c gets Rng(chunk_seed(seed, c)).
void for_each_chunk(std::size_t n, std::uint64_t seed, const ChunkFn& fn, std::size_t threads = 0);
// Same chunking without random numbers.
void parallel_for(std::size_t n, const std::function<void(std::size_t begin, std::size_t end)>& fn,
                  std::size_t threads = 0, std::size_t chunk = kChunkSize);

}  // namespace fracflow
