#pragma once

// Seeded random test families. Everything here is deterministic for a fixed
// seed on a given standard library.

#include "graph.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace morality::gen {

inline constexpr std::uint64_t default_seed = 20240601;

/// Random dag: a random topological order, each forward pair an arc with
/// probability p.
inline Dag random_dag(std::size_t n, double p, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<Vertex> order(n);
    std::iota(order.begin(), order.end(), Vertex{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::bernoulli_distribution coin(std::clamp(p, 0.0, 1.0));
    std::vector<Arc> arcs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (coin(rng))
                arcs.push_back({order[i], order[j]});
    return Dag::build(n, arcs);
}

/// Erdos-Renyi G(n, p).
inline UndirectedGraph gnp(std::size_t n, double p, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(std::clamp(p, 0.0, 1.0));
    std::vector<Edge> edges;
    for (Vertex a = 0; a < n; ++a)
        for (Vertex b = a + 1; b < n; ++b)
            if (coin(rng))
                edges.push_back({a, b});
    return UndirectedGraph::build(n, edges);
}

/// Random chordal graph. Each new vertex attaches to a random subset of a
/// clique {u} + K(u), where K(u) is the clique u attached to, so reversed
/// insertion order is a perfect elimination order.
inline UndirectedGraph random_chordal(std::size_t n, double p, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(std::clamp(p, 0.0, 1.0));
    std::vector<std::vector<Vertex>> attached(n);
    std::vector<Edge> edges;
    std::vector<Vertex> label(n);
    std::iota(label.begin(), label.end(), Vertex{0});
    std::shuffle(label.begin(), label.end(), rng);
    for (Vertex w = 1; w < n; ++w) {
        std::uniform_int_distribution<Vertex> pick(0, w - 1);
        const Vertex u = pick(rng);
        std::vector<Vertex> chosen;
        if (coin(rng) || coin(rng))
            chosen.push_back(u);
        for (Vertex k : attached[u])
            if (coin(rng))
                chosen.push_back(k);
        for (Vertex k : chosen)
            edges.push_back(Edge::canonical(label[w], label[k]));
        attached[w] = std::move(chosen);
    }
    return UndirectedGraph::build(n, edges);
}

/// Moral graph of a random dag; always moral.
inline UndirectedGraph random_moralized(std::size_t n, double p, std::uint64_t seed)
{
    return moralize(random_dag(n, p, seed));
}

/// The labeled graph on n vertices whose edges are the set bits of `mask`
/// over the canonical pair order (0,1),(0,2),...,(n-2,n-1).
inline UndirectedGraph graph_from_mask(std::size_t n, std::uint64_t mask)
{
    std::vector<Edge> edges;
    std::size_t bit = 0;
    for (Vertex a = 0; a < n; ++a)
        for (Vertex b = a + 1; b < n; ++b, ++bit)
            if (mask >> bit & 1U)
                edges.push_back({a, b});
    return UndirectedGraph::build(n, edges);
}

} // namespace morality::gen
