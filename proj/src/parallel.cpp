#include "semibloch/parallel.hpp"

#include <atomic>

namespace semibloch {

namespace {
std::atomic<int> g_threads{1};
}

int default_threads() { return g_threads.load(); }

void set_default_threads(int n) { g_threads.store(n < 1 ? 1 : n); }

std::mutex& fftw_planner_lock() {
  static std::mutex m;
  return m;
}

}  // namespace semibloch
