#include "fgforge/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace fgforge {
namespace {

thread_local bool g_in_worker = false;

struct Job {
  const std::function<void(std::size_t, std::size_t)>* fn = nullptr;
  std::size_t n = 0;
  std::size_t chunk = 1;
  std::size_t tasks = 0;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::exception_ptr error;
  std::mutex error_mu;
};

struct Pool {
  std::vector<std::thread> workers;
  std::mutex mu;
  std::condition_variable cv_work;
  std::condition_variable cv_done;
  std::shared_ptr<Job> job;
  std::uint64_t generation = 0;
  bool stop = false;
  std::mutex run_mu;

  explicit Pool(int threads) {
    for (int i = 0; i < threads - 1; ++i) {
      workers.emplace_back([this] { worker_loop(); });
    }
  }

  ~Pool() {
    {
      std::lock_guard<std::mutex> lk(mu);
      stop = true;
    }
    cv_work.notify_all();
    for (auto& w : workers) w.join();
  }

  void run_tasks(Job& j) {
    for (;;) {
      std::size_t begin = j.next.fetch_add(j.chunk);
      if (begin >= j.n) break;
      std::size_t end = std::min(j.n, begin + j.chunk);
      try {
        (*j.fn)(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lk(j.error_mu);
        if (!j.error) j.error = std::current_exception();
      }
      ++j.done;
      cv_done.notify_all();
    }
  }

  void worker_loop() {
    g_in_worker = true;
    std::uint64_t seen = 0;
    for (;;) {
      std::shared_ptr<Job> j;
      {
        std::unique_lock<std::mutex> lk(mu);
        cv_work.wait(lk, [&] { return stop || (job && generation != seen); });
        if (stop) return;
        seen = generation;
        j = job;
      }
      run_tasks(*j);
    }
  }

  void run(std::size_t n,
           const std::function<void(std::size_t, std::size_t)>& fn) {
    std::lock_guard<std::mutex> run_lk(run_mu);
    auto j = std::make_shared<Job>();
    j->fn = &fn;
    j->n = n;
    std::size_t threads = workers.size() + 1;
    j->chunk = std::max<std::size_t>(1, n / (threads * 8));
    j->tasks = (n + j->chunk - 1) / j->chunk;
    {
      std::lock_guard<std::mutex> lk(mu);
      job = j;
      ++generation;
    }
    cv_work.notify_all();
    run_tasks(*j);
    {
      std::unique_lock<std::mutex> lk(mu);
      cv_done.wait(lk, [&] { return j->done.load() >= j->tasks; });
      job.reset();
    }
    if (j->error) std::rethrow_exception(j->error);
  }
};

Pool& pool() {
  static Pool p(thread_budget());
  return p;
}

}  // namespace

int thread_budget() {
  static const int budget = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    int n = std::min(hw, 8);
    if (const char* env = std::getenv("FGFORGE_THREADS")) {
      char* end = nullptr;
      long v = std::strtol(env, &end, 10);
      if (end != env && v >= 1) n = static_cast<int>(std::min<long>(v, 64));
    }
    return n;
  }();
  return budget;
}

void parallel_ranges(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  if (g_in_worker || thread_budget() == 1 || n < 2) {
    fn(0, n);
    return;
  }
  // Mark the caller as a worker for the duration so nested calls from fn
  // run serially instead of deadlocking on the single job slot.
  g_in_worker = true;
  try {
    pool().run(n, fn);
  } catch (...) {
    g_in_worker = false;
    throw;
  }
  g_in_worker = false;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  parallel_ranges(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) fn(i);
  });
}

}  // namespace fgforge
