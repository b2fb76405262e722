#include "windlab/rng.hpp"

#include <atomic>
#include <thread>

namespace windlab {

namespace {
std::atomic<unsigned> g_workers{0};
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index)
{
    return splitmix64(master + 0x9E3779B97F4A7C15ULL * (index + 1));
}

Rng make_stream(std::uint64_t master, std::uint64_t index)
{
    return Rng(stream_seed(master, index));
}

unsigned worker_count()
{
    unsigned n = g_workers.load();
    if (n == 0) {
        n = std::thread::hardware_concurrency();
        if (n == 0)
            n = 1;
    }
    return n;
}

void set_worker_count(unsigned n)
{
    g_workers.store(n);
}

} // namespace windlab
