#pragma once

#include <cstdint>
#include <random>

namespace windlab {

using Rng = std::mt19937_64;

// 64-bit finalizer from splitmix64.
std::uint64_t splitmix64(std::uint64_t x);

// Seed of stream `index` derived from a master seed:
//   seed_i = splitmix64(master + 0x9E3779B97F4A7C15 * (index + 1))
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index);

Rng make_stream(std::uint64_t master, std::uint64_t index);

// Number of worker threads used by the parallel drivers.  Results never
// depend on it because work is split into a fixed number of streams.
unsigned worker_count();
void set_worker_count(unsigned n);

} // namespace windlab
