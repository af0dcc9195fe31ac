#include "osgrf/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace osgrf {

namespace {

thread_local bool inside_parallel_region = false;

constexpr std::size_t kChunks = 256;

}  // namespace

int thread_count() {
    if (const char* env = std::getenv("OSGRF_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return v;
        } catch (const std::exception&) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::size_t chunk_count(std::size_t n) { return std::min(n, kChunks); }

std::size_t chunk_begin(std::size_t n, std::size_t c) {
    const std::size_t m = chunk_count(n);
    return m == 0 ? 0 : n * c / m;
}

void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    const std::size_t chunks = chunk_count(n);
    if (chunks == 0) return;
    const auto workers = static_cast<std::size_t>(std::max(1, thread_count()));
    if (inside_parallel_region || workers == 1 || chunks == 1) {
        for (std::size_t c = 0; c < chunks; ++c) body(c, chunk_begin(n, c), chunk_begin(n, c + 1));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&]() {
        inside_parallel_region = true;
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) break;
            try {
                body(c, chunk_begin(n, c), chunk_begin(n, c + 1));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
        inside_parallel_region = false;
    };
    std::vector<std::thread> pool;
    const std::size_t spawn = std::min(workers, chunks) - 1;
    pool.reserve(spawn);
    for (std::size_t i = 0; i < spawn; ++i) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    parallel_chunks(n, [&](std::size_t, std::size_t begin, std::size_t end) { body(begin, end); });
}

}  // namespace osgrf
