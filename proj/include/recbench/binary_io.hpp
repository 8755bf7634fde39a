#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>

namespace recbench::binary {

inline void put_f64(std::ostream& out, double value) {
    const auto bits = std::bit_cast<std::uint64_t>(value);
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    out.write(bytes, 8);
}

/// Returns false on a short read.
inline bool get_f64(std::istream& in, double& value) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) return false;
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    value = std::bit_cast<double>(bits);
    return true;
}

}  // namespace recbench::binary
