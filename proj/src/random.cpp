#include "fracflow/random.hpp"

#include "fracflow/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fracflow {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk)
{
    return splitmix64(splitmix64(seed) ^ splitmix64(chunk + 0x632BE59BD9B4E019ULL));
}

double Rng::exponential() { return -std::log(uniform()); }

double Rng::normal()
{
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
}

std::uint64_t Rng::poisson(double mean)
{
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("poisson mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    if (mean < 40.0) {
        // inversion by sequential search
        double p = std::exp(-mean);
        double cdf = p;
        const double u = uniform();
        std::uint64_t k = 0;
        while (u > cdf) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
            if (p == 0.0 && cdf < u) break;  // round-off guard far in the tail
        }
        return k;
    }
    // PTRS transformed rejection (Hormann 1993)
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = uniform() - 0.5;
        const double v = uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
            -mean + k * loglam - std::lgamma(k + 1.0))
            return static_cast<std::uint64_t>(k);
    }
}

double Rng::gamma(double shape)
{
    if (!(shape > 0.0)) throw DomainError("gamma shape must be > 0");
    if (shape < 1.0) {
        const double g = gamma(shape + 1.0);
        return g * std::pow(uniform(), 1.0 / shape);
    }
    // Marsaglia-Tsang
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

namespace {

std::size_t initial_threads()
{
    if (const char* env = std::getenv("FRACFLOW_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<std::size_t> g_threads{0};

}  // namespace

std::size_t default_threads()
{
    std::size_t t = g_threads.load();
    if (t == 0) {
        t = initial_threads();
        g_threads.store(t);
    }
    return t;
}

void set_default_threads(std::size_t n) { g_threads.store(n); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn, std::size_t threads,
                  std::size_t chunk)
{
    if (n == 0) return;
    if (threads == 0) threads = default_threads();
    const std::size_t nchunks = (n + chunk - 1) / chunk;
    threads = std::min(threads, nchunks);
    auto body = [&](std::size_t c) { fn(c * chunk, std::min(n, (c + 1) * chunk)); };
    if (threads <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c) body(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= nchunks) return;
                try {
                    body(c);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                    next.store(nchunks);
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

void for_each_chunk(std::size_t n, std::uint64_t seed, const ChunkFn& fn, std::size_t threads)
{
    parallel_for(
        n,
        [&](std::size_t b, std::size_t e) {
            Rng rng(chunk_seed(seed, b / kChunkSize));
            fn(rng, b, e);
        },
        threads, kChunkSize);
}

}  // namespace fracflow
