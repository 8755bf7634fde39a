#include "recbench/io_stats.hpp"

#include <atomic>

namespace recbench {

namespace {
std::atomic<std::uint64_t> accesses{0};
}

std::uint64_t file_access_count() noexcept { return accesses.load(std::memory_order_relaxed); }

void note_file_access() noexcept { accesses.fetch_add(1, std::memory_order_relaxed); }

}  // namespace recbench
