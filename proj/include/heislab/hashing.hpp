///
/// \file hashing.hpp
///
/// FNV-1a, used for content hashes, descriptor cache keys and config hashes.
///
#ifndef HEISLAB_HASHING_HPP
#define HEISLAB_HASHING_HPP

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace heislab
{

inline constexpr std::uint64_t fnv_offset = 1469598103934665603ull;

inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = fnv_offset)
{
    const auto* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i)
    {
        h ^= b[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = fnv_offset) { return fnv1a(s.data(), s.size(), h); }

/// 16 lowercase hex digits.
inline std::string hex64(std::uint64_t h)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace heislab

#endif
