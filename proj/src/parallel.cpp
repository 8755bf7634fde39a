#include "recbench/parallel.hpp"

#include <atomic>

namespace recbench {

namespace {
std::atomic<int> g_default_threads{1};
}

int default_threads() noexcept { return g_default_threads.load(); }

void set_default_threads(int threads) noexcept { g_default_threads.store(std::max(threads, 1)); }

}  // namespace recbench
