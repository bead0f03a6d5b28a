#pragma once

// Minimal persistent fork-join pool. A single parallel_for runs at a time;
// the calling thread participates as worker 0, so a one-thread pool never
// spawns or context-switches. Chunk boundaries depend only on (n, threads),
// which keeps per-thread accumulations deterministic run to run.

#include <algorithm>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace wadg {

class ThreadPool {
 public:
  using Body =
      std::function<void(int thread, std::size_t begin, std::size_t end)>;

  explicit ThreadPool(int nthreads = 0) {
    if (nthreads <= 0)
      nthreads = static_cast<int>(std::thread::hardware_concurrency());
    nthreads_ = std::max(nthreads, 1);
    workers_.reserve(static_cast<std::size_t>(nthreads_ - 1));
    for (int t = 1; t < nthreads_; ++t)
      workers_.emplace_back([this, t] { worker_loop(t); });
  }

  ~ThreadPool() {
    {
      std::lock_guard<std::mutex> lk(m_);
      stop_ = true;
      ++epoch_;
    }
    cv_.notify_all();
    for (auto& w : workers_) w.join();
  }

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int size() const { return nthreads_; }

  // Splits [0, n) into one contiguous chunk per thread and blocks until all
  // chunks finish. fn(t, b, e) must only write state owned by thread t.
  void parallel_for(std::size_t n, const Body& fn) {
    if (n == 0) return;
    if (nthreads_ == 1) {
      fn(0, 0, n);
      return;
    }
    {
      std::lock_guard<std::mutex> lk(m_);
      body_ = &fn;
      count_ = n;
      pending_ = nthreads_ - 1;
      ++epoch_;
    }
    cv_.notify_all();
    run_chunk(0);
    std::unique_lock<std::mutex> lk(m_);
    done_cv_.wait(lk, [this] { return pending_ == 0; });
    body_ = nullptr;
  }

 private:
  void run_chunk(int t) {
    const std::size_t nt = static_cast<std::size_t>(nthreads_);
    const std::size_t tt = static_cast<std::size_t>(t);
    const std::size_t per = count_ / nt;
    const std::size_t rem = count_ % nt;
    const std::size_t begin = tt * per + std::min(tt, rem);
    const std::size_t end = begin + per + (tt < rem ? 1 : 0);
    if (begin < end) (*body_)(t, begin, end);
  }

  void worker_loop(int t) {
    std::uint64_t seen = 0;
    for (;;) {
      {
        std::unique_lock<std::mutex> lk(m_);
        cv_.wait(lk, [&] { return epoch_ != seen; });
        seen = epoch_;
        if (stop_) return;
      }
      run_chunk(t);
      {
        std::lock_guard<std::mutex> lk(m_);
        if (--pending_ == 0) done_cv_.notify_one();
      }
    }
  }

  int nthreads_ = 1;
  std::vector<std::thread> workers_;
  std::mutex m_;
  std::condition_variable cv_, done_cv_;
  const Body* body_ = nullptr;
  std::size_t count_ = 0;
  int pending_ = 0;
  std::uint64_t epoch_ = 0;
  bool stop_ = false;
};

} // namespace wadg
