#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace beltrami {

// Chunked parallel loop over [begin, end). Each index is processed exactly
// once by one thread; results must be written to disjoint slots so the
// outcome is independent of the thread count.
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn) {
    const std::size_t count = end > begin ? end - begin : 0;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::size_t workers =
        std::min<std::size_t>(hw, std::max<std::size_t>(count / 256, 1));
    if (workers <= 1) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = begin + w * chunk;
        const std::size_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

}  // namespace beltrami
