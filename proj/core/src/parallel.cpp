#include "nchf/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace nchf {
namespace {

int default_thread_count() {
  if (const char* env = std::getenv("NCHF_THREADS")) {
    try {
      const int value = std::stoi(env);
      if (value > 0) return value;
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::atomic<int> g_override{0};

}  // namespace

int thread_count() {
  static const int from_env = default_thread_count();
  const int forced = g_override.load(std::memory_order_relaxed);
  return forced > 0 ? forced : from_env;
}

void set_thread_count(int threads) {
  g_override.store(threads > 0 ? threads : 0, std::memory_order_relaxed);
}

}  // namespace nchf
