#include "koss/parallel.hpp"

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <vector>

namespace koss {
namespace {

class Pool {
 public:
  explicit Pool(int workers) {
    for (int i = 0; i < workers; ++i)
      threads_.emplace_back([this] { worker_loop(); });
  }

  ~Pool() {
    {
      std::unique_lock<std::mutex> lk(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  void run(int64_t begin, int64_t end, int64_t block,
           const std::function<void(int64_t, int64_t)>& body) {
    std::unique_lock<std::mutex> lk(mu_);
    body_ = &body;
    next_ = begin;
    end_ = end;
    block_ = block;
    pending_ = (end - begin + block - 1) / block;
    generation_++;
    cv_.notify_all();
    // The calling thread participates too.
    lk.unlock();
    drain();
    lk.lock();
    done_cv_.wait(lk, [this] { return pending_ == 0; });
    body_ = nullptr;
  }

 private:
  void drain() {
    for (;;) {
      int64_t b, e;
      {
        std::unique_lock<std::mutex> lk(mu_);
        if (body_ == nullptr || next_ >= end_) return;
        b = next_;
        next_ += block_;
        e = std::min(next_, end_);
      }
      (*body_)(b, e);
      std::unique_lock<std::mutex> lk(mu_);
      if (--pending_ == 0) done_cv_.notify_all();
    }
  }

  void worker_loop() {
    uint64_t seen = 0;
    for (;;) {
      {
        std::unique_lock<std::mutex> lk(mu_);
        cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
      }
      drain();
    }
  }

  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  std::vector<std::thread> threads_;
  const std::function<void(int64_t, int64_t)>* body_ = nullptr;
  int64_t next_ = 0, end_ = 0, block_ = 1, pending_ = 0;
  uint64_t generation_ = 0;
  bool stop_ = false;
};

int g_cap = 0;

int effective_threads() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (g_cap > 0 && g_cap < hw) return g_cap;
  return hw;
}

Pool& pool() {
  // Workers beyond the caller; pool of (threads - 1).
  static Pool p(effective_threads() - 1);
  return p;
}

}  // namespace

void set_thread_cap(int threads) { g_cap = threads; }

int thread_count() { return effective_threads(); }

void parallel_for(int64_t begin, int64_t end,
                  const std::function<void(int64_t, int64_t)>& body) {
  if (end <= begin) return;
  int64_t n = end - begin;
  int threads = effective_threads();
  if (threads <= 1 || n == 1) {
    body(begin, end);
    return;
  }
  // ~4 blocks per thread for balance.
  int64_t block = (n + 4 * threads - 1) / (4 * threads);
  if (block < 1) block = 1;
  pool().run(begin, end, block, body);
}

void parallel_for_each(int64_t begin, int64_t end, const std::function<void(int64_t)>& body) {
  parallel_for(begin, end, [&](int64_t b, int64_t e) {
    for (int64_t i = b; i < e; ++i) body(i);
  });
}

}  // namespace koss
