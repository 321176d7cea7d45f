#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/dynamic_bitset.hpp>

namespace morality {

using Vertex = std::uint32_t;
using VertexSet = boost::dynamic_bitset<std::uint64_t>;

/// Undirected edge; `u < v` after canonicalization.
struct Edge {
    Vertex u = 0;
    Vertex v = 0;

    static constexpr Edge canonical(Vertex a, Vertex b) noexcept
    {
        return a < b ? Edge{a, b} : Edge{b, a};
    }

    auto operator<=>(const Edge&) const = default;
};

/// Directed edge `from -> to`.
struct Arc {
    Vertex from = 0;
    Vertex to = 0;

    auto operator<=>(const Arc&) const = default;
};

/// Malformed caller input: bad vertex ids, unparsable files, mismatched sizes.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A documented precondition was violated (cyclic "dag", incomplete trace, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// 64-bit FNV-1a, used for stable fingerprints of tables and configurations.
inline constexpr std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 14695981039346656037ULL) noexcept
{
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace morality
