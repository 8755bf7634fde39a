#pragma once

#include <cstdint>

namespace recbench {

/// Number of files the library has opened for reading or writing. Timing code
/// compares it before and after a measured region.
std::uint64_t file_access_count() noexcept;
void note_file_access() noexcept;

}  // namespace recbench
