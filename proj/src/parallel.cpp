#include "latcov/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace latcov {

namespace {
std::atomic<int> g_override{0};
}

void set_thread_count_override(int n) { g_override = n > 0 ? n : 0; }

int thread_count() {
    if (int o = g_override.load(); o > 0) return o;
    int n = 0;
    if (const char* e = std::getenv("LATTICE_COVER_THREADS")) n = std::atoi(e);
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    return n <= 0 ? 1 : n;
}

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
    int t = thread_count();
    if (t <= 1 || n < 2) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    if (static_cast<size_t>(t) > n) t = static_cast<int>(n);
    std::atomic<size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < t; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> g(err_mu);
                    if (!err) err = std::current_exception();
                    next = n;
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace latcov
