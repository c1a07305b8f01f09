#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ensemblefolio {

/// Fixed-size worker pool for data-parallel loops. parallel_for splits the
/// index range into contiguous chunks; the body must write only to slots
/// owned by its indices, so results never depend on the worker count.
class ThreadPool {
 public:
  explicit ThreadPool(std::size_t threads = 1);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  [[nodiscard]] std::size_t size() const noexcept { return workers_.size() + 1; }

  /// Runs body(begin, end) over [0, n). Ranges smaller than min_chunk run inline.
  void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                    std::size_t min_chunk = 1024);

 private:
  void worker_loop(std::size_t slot);

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t, std::size_t)>* body_ = nullptr;
  std::size_t total_ = 0;
  std::size_t chunk_ = 0;
  std::size_t generation_ = 0;
  std::size_t pending_ = 0;
  bool stop_ = false;
  std::exception_ptr worker_error_;
};

/// Worker count from ENSEMBLEFOLIO_THREADS, else hardware concurrency (at least 1).
std::size_t threads_from_environment();

}  // namespace ensemblefolio
