#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace spectra {

// Runs fn(block_index) for blocks 0..num_blocks-1 on up to `threads` workers.
// Block structure is independent of the worker count, so results that are
// reduced per block and then combined in block order are deterministic.
template <typename Fn>
void parallel_blocks(int num_blocks, int threads, Fn&& fn) {
    if (threads <= 1 || num_blocks <= 1) {
        for (int b = 0; b < num_blocks; ++b) fn(b);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    int workers = std::min(threads, num_blocks);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                int b = next.fetch_add(1);
                if (b >= num_blocks) return;
                fn(b);
            }
        });
    for (auto& t : pool) t.join();
}

// Deterministic, platform-independent RNG helpers.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

} // namespace spectra
