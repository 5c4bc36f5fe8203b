#include "qcrapp/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace qcr::app {

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

void ordered_sweep(std::size_t n, unsigned threads, const std::function<Row(std::size_t)>& point,
                   const std::function<void(std::size_t, const Row&)>& sink) {
    std::vector<std::optional<Row>> done(n);
    std::mutex m;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr failure;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || stop.load()) break;
            try {
                Row r = point(i);
                std::lock_guard lk(m);
                done[i] = std::move(r);
            } catch (...) {
                std::lock_guard lk(m);
                if (!failure) failure = std::current_exception();
                stop = true;
            }
            cv.notify_all();
        }
    };

    const unsigned nt = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(n, 1)));
    std::vector<std::jthread> pool;
    pool.reserve(nt);
    for (unsigned k = 0; k < nt; ++k) pool.emplace_back(worker);

    std::exception_ptr sink_failure;
    for (std::size_t i = 0; i < n; ++i) {
        Row r;
        {
            std::unique_lock lk(m);
            cv.wait(lk, [&] { return done[i].has_value() || failure != nullptr; });
            if (!done[i]) break;
            r = std::move(*done[i]);
            done[i].reset();
        }
        try {
            sink(i, r);
        } catch (...) {
            sink_failure = std::current_exception();
            stop = true;
            break;
        }
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
    if (sink_failure) std::rethrow_exception(sink_failure);
}

} // namespace qcr::app
