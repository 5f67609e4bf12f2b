#include "psv/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace psv {
namespace {

int g_workers = [] {
    if (const char* env = std::getenv("PSV_WORKERS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}();

} // namespace

int worker_count() { return g_workers; }

void set_worker_count(int n) { g_workers = n < 1 ? 1 : n; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const int nw = g_workers;
    if (nw <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mtx;
    std::exception_ptr err;
    auto body = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mtx);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int spawn = static_cast<int>(std::min<std::size_t>(nw, n));
    pool.reserve(spawn);
    for (int t = 0; t < spawn; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace psv
