#pragma once

#include <atomic>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace hpl {

// Binary-counter pairwise accumulator. Adding n terms performs the same
// additions as a balanced reduction tree, so the rounding error grows like
// O(log n) instead of O(n) for a left fold. The result depends only on the
// order in which terms are pushed, never on thread count.
template <typename T>
class PairwiseSum {
public:
    void add(T x) {
        std::size_t level = 0;
        while (mask_ & (std::size_t{1} << level)) {
            x += levels_[level];
            ++level;
        }
        if (level == levels_.size())
            levels_.push_back(x);
        else
            levels_[level] = x;
        mask_ += 1;
    }

    T total() const {
        T acc{};
        for (std::size_t i = 0; i < levels_.size(); ++i)
            if (mask_ & (std::size_t{1} << i)) acc += levels_[i];
        return acc;
    }

    std::size_t count() const { return mask_; }

private:
    std::vector<T> levels_;
    std::size_t mask_ = 0;
};

template <typename T>
T pairwise_sum(std::span<const T> xs) {
    PairwiseSum<T> acc;
    for (const T& x : xs) acc.add(x);
    return acc.total();
}

// Worker count; override with the HPL_THREADS environment variable.
inline unsigned hardware_threads() {
    if (const char* s = std::getenv("HPL_THREADS")) {
        int v = std::atoi(s);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned h = std::thread::hardware_concurrency();
    return h ? h : 1;
}

// Splits [0, n) into fixed-size chunks (independent of thread count), runs
// `chunk(begin, end)` for each, and combines per-chunk results in chunk order
// with a pairwise reduction. Deterministic for any HPL_THREADS setting.
template <typename T>
T parallel_chunked_sum(std::size_t n, std::size_t chunk_size,
                       const std::function<T(std::size_t, std::size_t)>& chunk) {
    if (n == 0) return T{};
    if (chunk_size == 0) chunk_size = 1;
    const std::size_t nchunks = (n + chunk_size - 1) / chunk_size;
    std::vector<T> partial(nchunks);

    unsigned nthreads = hardware_threads();
    if (nthreads > nchunks) nthreads = static_cast<unsigned>(nchunks);
    if (nthreads <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c)
            partial[c] = chunk(c * chunk_size, std::min(n, (c + 1) * chunk_size));
    } else {
        std::vector<std::thread> workers;
        std::atomic<std::size_t> next{0};
        for (unsigned t = 0; t < nthreads; ++t) {
            workers.emplace_back([&] {
                for (;;) {
                    std::size_t c = next.fetch_add(1);
                    if (c >= nchunks) break;
                    partial[c] = chunk(c * chunk_size, std::min(n, (c + 1) * chunk_size));
                }
            });
        }
        for (auto& w : workers) w.join();
    }
    return pairwise_sum(std::span<const T>(partial));
}

} // namespace hpl
