#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace mhagent::datapipe {

// Applies fn to every item on up to `jobs` threads. Results come back in
// input order whatever the scheduling. The first exception (by index) is
// rethrown after all workers finish.
template <typename T, typename Fn>
auto parallel_map(const std::vector<T>& items, Fn fn, std::size_t jobs = 1)
    -> std::vector<std::invoke_result_t<Fn&, const T&, std::size_t>> {
    using R = std::invoke_result_t<Fn&, const T&, std::size_t>;
    std::vector<std::optional<R>> slots(items.size());
    std::vector<std::exception_ptr> errors(items.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < items.size(); i = next++) {
            try {
                slots[i].emplace(fn(items[i], i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(items.size(), 1));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<R> out;
    out.reserve(items.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace mhagent::datapipe
