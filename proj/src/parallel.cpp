#include "infoextract/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace infoextract {

namespace {
std::atomic<unsigned> g_thread_limit{0};

// Nested parallel sections run serially inside a worker; one level of
// fan-out is enough and this keeps thread counts bounded.
thread_local bool t_in_worker = false;

unsigned hardware_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

void run_workers(std::size_t unit_count, const std::function<void(std::size_t)>& unit_fn) {
    const unsigned workers =
        t_in_worker ? 1
                    : static_cast<unsigned>(std::min<std::size_t>(effective_threads(), unit_count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < unit_count; ++i) {
            unit_fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        t_in_worker = true;
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= unit_count) {
                return;
            }
            try {
                unit_fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(body);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}
}  // namespace

void set_thread_limit(unsigned n) { g_thread_limit.store(n); }

unsigned effective_threads() {
    const unsigned limit = g_thread_limit.load();
    const unsigned hw = hardware_threads();
    if (limit == 0) {
        return hw;
    }
    return limit < hw ? limit : hw;
}

void parallel_chunks(std::size_t count, std::size_t chunk_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (count == 0) {
        return;
    }
    if (chunk_size == 0) {
        chunk_size = 1;
    }
    const std::size_t chunks = (count + chunk_size - 1) / chunk_size;
    run_workers(chunks, [&](std::size_t ci) {
        const std::size_t begin = ci * chunk_size;
        const std::size_t end = std::min(begin + chunk_size, count);
        fn(ci, begin, end);
    });
}

void parallel_indices(std::size_t count, const std::function<void(std::size_t)>& fn) {
    run_workers(count, fn);
}

}  // namespace infoextract
