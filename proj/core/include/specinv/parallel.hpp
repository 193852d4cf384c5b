#ifndef SPECINV_PARALLEL_HPP
#define SPECINV_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace specinv {

/// Runs fn(i) for i in [0, count). Work items must be independent and write
/// only to their own output slots; results are then deterministic regardless
/// of the thread count. threads == 0 picks the hardware concurrency.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned threads = 0) {
    if (count == 0)
        return;
    unsigned hw = threads ? threads : std::thread::hardware_concurrency();
    if (hw <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    unsigned nt = static_cast<unsigned>(std::min<std::size_t>(hw, count));
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&, t]() {
            try {
                for (std::size_t i = t; i < count; i += nt)
                    fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error)
                    first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace specinv

#endif
