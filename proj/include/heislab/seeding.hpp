///
/// \file seeding.hpp
///
/// Derived RNG seeds. std::seed_seq keeps only the low 32 bits of each entry, so
/// 64-bit inputs are split into two words first.
///
#ifndef HEISLAB_SEEDING_HPP
#define HEISLAB_SEEDING_HPP

#include <array>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace heislab
{

inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts)
{
    std::vector<std::uint32_t> words;
    words.reserve(2 * parts.size());
    for (std::uint64_t p : parts)
    {
        words.push_back(static_cast<std::uint32_t>(p));
        words.push_back(static_cast<std::uint32_t>(p >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

} // namespace heislab

#endif
