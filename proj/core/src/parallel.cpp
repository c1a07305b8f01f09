#include "ensemblefolio/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <utility>

namespace ensemblefolio {

ThreadPool::ThreadPool(std::size_t threads) {
  const std::size_t extra = threads > 1 ? threads - 1 : 0;
  workers_.reserve(extra);
  for (std::size_t slot = 0; slot < extra; ++slot) {
    workers_.emplace_back([this, slot] { worker_loop(slot + 1); });
  }
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& w : workers_) w.join();
}

void ThreadPool::parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                              std::size_t min_chunk) {
  if (n == 0) return;
  if (workers_.empty() || n < 2 * min_chunk) {
    body(0, n);
    return;
  }
  const std::size_t parts = std::min(size(), (n + min_chunk - 1) / min_chunk);
  const std::size_t chunk = (n + parts - 1) / parts;
  {
    std::lock_guard lock(mutex_);
    body_ = &body;
    total_ = n;
    chunk_ = chunk;
    pending_ = workers_.size();
    ++generation_;
  }
  wake_.notify_all();

  std::exception_ptr error;
  try {
    body(0, std::min(chunk, n));
  } catch (...) {
    error = std::current_exception();
  }

  std::unique_lock lock(mutex_);
  done_.wait(lock, [this] { return pending_ == 0; });
  body_ = nullptr;
  if (!error) error = std::exchange(worker_error_, nullptr);
  worker_error_ = nullptr;
  if (error) std::rethrow_exception(error);
}

void ThreadPool::worker_loop(std::size_t slot) {
  std::size_t seen = 0;
  for (;;) {
    const std::function<void(std::size_t, std::size_t)>* body = nullptr;
    std::size_t begin = 0;
    std::size_t end = 0;
    {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      body = body_;
      begin = std::min(slot * chunk_, total_);
      end = std::min(begin + chunk_, total_);
    }
    if (begin < end) {
      try {
        (*body)(begin, end);
      } catch (...) {
        std::lock_guard lock(mutex_);
        if (!worker_error_) worker_error_ = std::current_exception();
      }
    }
    {
      std::lock_guard lock(mutex_);
      --pending_;
    }
    done_.notify_one();
  }
}

std::size_t threads_from_environment() {
  if (const char* env = std::getenv("ENSEMBLEFOLIO_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace ensemblefolio
