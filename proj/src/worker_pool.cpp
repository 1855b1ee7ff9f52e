#include "berrt/worker_pool.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <utility>

namespace berrt {

std::size_t default_worker_count() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      // fall through to hardware concurrency
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

WorkerPool::WorkerPool(std::size_t workers)
    : workers_(workers == 0 ? default_worker_count() : workers) {
  threads_.reserve(workers_ - 1);
  for (std::size_t w = 1; w < workers_; ++w) {
    threads_.emplace_back([this, w] { worker_loop(w); });
  }
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  start_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::worker_loop(std::size_t worker) {
  std::size_t seen = 0;
  for (;;) {
    const ChunkFn* job = nullptr;
    std::size_t count = 0;
    {
      std::unique_lock lock(mutex_);
      start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      job = job_;
      count = job_count_;
    }
    try {
      (*job)(worker, chunk_begin(count, workers_, worker),
             chunk_begin(count, workers_, worker + 1));
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
    {
      std::lock_guard lock(mutex_);
      if (--pending_ == 0) done_cv_.notify_one();
    }
  }
}

void WorkerPool::parallel_for(std::size_t count, const ChunkFn& fn) {
  if (workers_ == 1 || count <= 1) {
    fn(0, 0, count);
    // Remaining workers own empty chunks.
    return;
  }
  {
    std::lock_guard lock(mutex_);
    job_ = &fn;
    job_count_ = count;
    pending_ = workers_ - 1;
    error_ = nullptr;
    ++generation_;
  }
  start_cv_.notify_all();

  std::exception_ptr local;
  try {
    fn(0, 0, chunk_begin(count, workers_, 1));
  } catch (...) {
    local = std::current_exception();
  }

  std::unique_lock lock(mutex_);
  done_cv_.wait(lock, [&] { return pending_ == 0; });
  job_ = nullptr;
  if (local) std::rethrow_exception(local);
  if (error_) std::rethrow_exception(std::exchange(error_, nullptr));
}

}  // namespace berrt
