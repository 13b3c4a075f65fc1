#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace qwalk::detail {

/// Fixed set of worker threads that run one task per worker and join before
/// `run` returns. The calling thread acts as worker 0.
class WorkerPool {
 public:
  explicit WorkerPool(unsigned worker_count) : worker_count_(worker_count == 0 ? 1 : worker_count) {
    threads_.reserve(worker_count_ - 1);
    for (unsigned w = 1; w < worker_count_; ++w) {
      threads_.emplace_back([this, w] { worker_loop(w); });
    }
  }

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  ~WorkerPool() {
    {
      std::lock_guard lock(mutex_);
      shutdown_ = true;
    }
    wake_.notify_all();
    for (auto& t : threads_) t.join();
  }

  unsigned size() const noexcept { return worker_count_; }

  /// Invokes task(w) for every worker index w and blocks until all finish.
  /// The first exception thrown by any worker is rethrown here.
  void run(const std::function<void(unsigned)>& task) {
    if (worker_count_ == 1) {
      task(0);
      return;
    }
    {
      std::lock_guard lock(mutex_);
      task_ = &task;
      pending_ = worker_count_ - 1;
      error_ = nullptr;
      ++generation_;
    }
    wake_.notify_all();

    std::exception_ptr local;
    try {
      task(0);
    } catch (...) {
      local = std::current_exception();
    }

    std::unique_lock lock(mutex_);
    done_.wait(lock, [this] { return pending_ == 0; });
    task_ = nullptr;
    if (local) std::rethrow_exception(local);
    if (error_) std::rethrow_exception(error_);
  }

 private:
  void worker_loop(unsigned w) {
    std::size_t seen = 0;
    for (;;) {
      const std::function<void(unsigned)>* task = nullptr;
      {
        std::unique_lock lock(mutex_);
        wake_.wait(lock, [&] { return shutdown_ || generation_ != seen; });
        if (shutdown_) return;
        seen = generation_;
        task = task_;
      }
      std::exception_ptr err;
      try {
        (*task)(w);
      } catch (...) {
        err = std::current_exception();
      }
      {
        std::lock_guard lock(mutex_);
        if (err && !error_) error_ = err;
        if (--pending_ == 0) done_.notify_one();
      }
    }
  }

  unsigned worker_count_;
  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(unsigned)>* task_ = nullptr;
  std::size_t generation_ = 0;
  unsigned pending_ = 0;
  std::exception_ptr error_;
  bool shutdown_ = false;
};

}  // namespace qwalk::detail
