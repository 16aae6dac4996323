#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ssjoin {

/// Fixed set of threads executing parallel-for jobs over an atomic item
/// counter. The calling thread participates, so a pool of size 1 runs
/// everything inline without any synchronization.
class WorkerPool {
public:
    explicit WorkerPool(unsigned workers) {
        if (workers < 1) workers = 1;
        for (unsigned i = 0; i + 1 < workers; ++i)
            threads_.emplace_back([this] { worker_loop(); });
    }

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    ~WorkerPool() {
        {
            std::lock_guard lock(mutex_);
            stop_ = true;
        }
        start_cv_.notify_all();
        for (auto& t : threads_) t.join();
    }

    unsigned workers() const { return static_cast<unsigned>(threads_.size()) + 1; }

    void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
        if (n == 0) return;
        if (threads_.empty() || n == 1) {
            for (std::size_t i = 0; i < n; ++i) body(i);
            return;
        }
        {
            std::lock_guard lock(mutex_);
            body_ = &body;
            items_ = n;
            next_.store(0, std::memory_order_relaxed);
            completed_.store(0, std::memory_order_relaxed);
            ++generation_;
        }
        start_cv_.notify_all();
        drain(body, n);
        std::unique_lock lock(mutex_);
        done_cv_.wait(lock, [&] {
            return completed_.load(std::memory_order_acquire) >= items_ && active_ == 0;
        });
        body_ = nullptr;
    }

private:
    void drain(const std::function<void(std::size_t)>& body, std::size_t n) {
        while (true) {
            std::size_t i = next_.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) break;
            body(i);
            if (completed_.fetch_add(1, std::memory_order_acq_rel) + 1 == n) {
                std::lock_guard lock(mutex_);
                done_cv_.notify_all();
            }
        }
    }

    void worker_loop() {
        std::uint64_t seen = 0;
        while (true) {
            const std::function<void(std::size_t)>* body;
            std::size_t n;
            {
                std::unique_lock lock(mutex_);
                start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
                if (stop_) return;
                seen = generation_;
                body = body_;
                n = items_;
                ++active_;
            }
            if (body) drain(*body, n); // body is null on a stale wake-up
            {
                std::lock_guard lock(mutex_);
                if (--active_ == 0) done_cv_.notify_all();
            }
        }
    }

    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable start_cv_, done_cv_;
    const std::function<void(std::size_t)>* body_ = nullptr;
    std::size_t items_ = 0;
    std::uint64_t generation_ = 0;
    unsigned active_ = 0;
    bool stop_ = false;
    std::atomic<std::size_t> next_{0}, completed_{0};
};

} // namespace ssjoin
