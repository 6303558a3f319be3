#include "f2ac/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace f2ac {

namespace {

int initial_threads() {
  if (const char* env = std::getenv("F2AC_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (...) {
    }
  }
  return 1;
}

std::atomic<int>& threads_setting() {
  static std::atomic<int> value{initial_threads()};
  return value;
}

}  // namespace

int thread_count() { return threads_setting().load(); }

void set_thread_count(int threads) { threads_setting().store(threads < 1 ? 1 : threads); }

std::size_t chunk_count(std::size_t total, std::size_t min_chunk) {
  if (total == 0) return 0;
  return std::max<std::size_t>(
      1, std::min<std::size_t>(static_cast<std::size_t>(thread_count()), (total + min_chunk - 1) / min_chunk));
}

}  // namespace f2ac
