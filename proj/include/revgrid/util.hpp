#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace revgrid {

/// Deterministic parallel loop: the index space is split into contiguous
/// chunks, one per worker. Results must not depend on the partition; callers
/// only write to disjoint per-index slots. The first exception thrown by any
/// worker is rethrown on the calling thread.
template <class Fn>
void parallel_for(int n, int threads, Fn&& body) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const int chunk = (n + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        const int begin = w * chunk;
        const int end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            try {
                for (int i = begin; i < end; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

/// Counts doubles held in particle-indexed buffers so the solvers can report
/// their peak resident grid storage.
class MemoryMeter {
public:
    void add(std::size_t doubles) {
        current_ += doubles;
        peak_ = std::max(peak_, current_);
    }
    void sub(std::size_t doubles) { current_ -= std::min(current_, doubles); }
    std::size_t peak() const { return peak_; }
    std::size_t current() const { return current_; }

private:
    std::size_t current_ = 0;
    std::size_t peak_ = 0;
};

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace revgrid
