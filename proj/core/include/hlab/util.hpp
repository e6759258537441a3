#ifndef HLAB_UTIL_HPP
#define HLAB_UTIL_HPP

#include <atomic>
#include <complex>
#include <functional>
#include <mutex>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace hlab {

using cplx = std::complex<double>;

/// Pairwise (cascade) summation. Order-independent of any outer
/// partitioning as long as chunks are recombined in index order, which is
/// what all parallel loops in this library do.
template <typename T>
T pairwise_sum(std::span<const T> v) {
    if (v.empty()) return T{};
    if (v.size() <= 8) {
        T acc{};
        for (const auto& x : v) acc += x;
        return acc;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
    return pairwise_sum(std::span<const T>(v));
}

/// Deterministic parallel map: fn(i) is evaluated for i in [0, n) on up to
/// `threads` workers and results are stored by index, so the output does not
/// depend on the schedule.
template <typename T>
std::vector<T> parallel_map(std::size_t n, unsigned threads,
                            const std::function<T(std::size_t)>& fn) {
    std::vector<T> out(n);
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    const unsigned nw = std::min<std::size_t>(threads, n);
    for (unsigned w = 0; w < nw; ++w) {
        pool.emplace_back([&] {
            try {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                    out[i] = fn(i);
            } catch (...) {
                std::scoped_lock lk(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

namespace detail {
inline std::atomic<unsigned>& thread_limit() {
    static std::atomic<unsigned> limit{0};
    return limit;
}
}  // namespace detail

/// Caps default_threads() process-wide; 0 restores hardware concurrency.
/// Only changes scheduling, never results.
inline void set_thread_limit(unsigned n) { detail::thread_limit().store(n); }

inline unsigned default_threads() {
    const unsigned limit = detail::thread_limit().load();
    if (limit != 0) return limit;
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace hlab

#endif
