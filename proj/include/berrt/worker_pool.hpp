#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace berrt {

/// Environment variable overriding the default worker count.
inline constexpr const char* kWorkersEnv = "BERRT_WORKERS";

/// $BERRT_WORKERS if set to a positive integer, otherwise the hardware
/// concurrency (at least 1).
std::size_t default_worker_count();

/// Fixed-size fork-join pool. `parallel_for` splits [0, count) into one
/// contiguous chunk per worker, in worker order, and returns once every chunk
/// is done; the return is the barrier. The calling thread runs chunk 0.
class WorkerPool {
 public:
  using ChunkFn = std::function<void(std::size_t worker, std::size_t begin,
                                     std::size_t end)>;

  /// `workers == 0` selects default_worker_count().
  explicit WorkerPool(std::size_t workers = 0);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const { return workers_; }

  void parallel_for(std::size_t count, const ChunkFn& fn);

  static std::size_t chunk_begin(std::size_t count, std::size_t workers,
                                 std::size_t worker) {
    return count * worker / workers;
  }

 private:
  void worker_loop(std::size_t worker);

  std::size_t workers_;
  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const ChunkFn* job_ = nullptr;
  std::size_t job_count_ = 0;
  std::size_t generation_ = 0;
  std::size_t pending_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

}  // namespace berrt
