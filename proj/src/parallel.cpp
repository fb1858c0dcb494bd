#include "dbarlab/parallel.hpp"

#include <atomic>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dbarlab {

namespace {
std::atomic<int> g_cap{0};

int env_cap() {
  static const int v = [] {
    const char* s = std::getenv("DBARLAB_THREADS");
    if (!s) return 0;
    int n = std::atoi(s);
    return n > 0 ? n : 0;
  }();
  return v;
}
}  // namespace

int thread_count() {
#ifdef _OPENMP
  int hw = omp_get_max_threads();
#else
  int hw = 1;
#endif
  int cap = g_cap.load(std::memory_order_relaxed);
  if (cap <= 0) cap = env_cap();
  if (cap <= 0) cap = hw;
  return cap < hw ? cap : hw;
}

void set_thread_cap(int n) { g_cap.store(n, std::memory_order_relaxed); }

}  // namespace dbarlab
