#include "vcmd/parallel.hpp"

#include <thread>
#include <vector>

namespace vcmd {

void parallel_for(std::int64_t n, int workers,
                  const std::function<void(std::int64_t, std::int64_t)>& fn) {
    if (n <= 0) return;
    if (workers > n) workers = static_cast<int>(n);
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::int64_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t begin = w * chunk;
        const std::int64_t end = std::min<std::int64_t>(begin + chunk, n);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : pool) t.join();
}

void parallel_jobs(int jobs, int workers, const std::function<void(int)>& fn) {
    parallel_for(jobs, workers, [&fn](std::int64_t b, std::int64_t e) {
        for (std::int64_t k = b; k < e; ++k) fn(static_cast<int>(k));
    });
}

} // namespace vcmd
