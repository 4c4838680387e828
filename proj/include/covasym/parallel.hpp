#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace covasym {

// Thread count from COVASYM_THREADS, else hardware concurrency.
int default_thread_count();

// Evaluates f(i) for i in [0, n); results are returned in index order whatever the thread count.
template <class F>
auto parallel_map(size_t n, int threads, F f) -> std::vector<decltype(f(size_t{}))> {
    using R = decltype(f(size_t{}));
    std::vector<R> out(n);
    const int t = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    if (t <= 1) {
        for (size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errs(t);
    std::vector<std::thread> pool;
    for (int k = 0; k < t; ++k) {
        pool.emplace_back([&, k] {
            try {
                for (size_t i = next++; i < n; i = next++) out[i] = f(i);
            } catch (...) {
                errs[k] = std::current_exception();
                next = n;
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace covasym
