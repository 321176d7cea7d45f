#pragma once

// Named example graphs. Vertices are letters; ids follow alphabetical order.

#include <morality/io.hpp>

namespace fixtures {

using morality::UndirectedGraph;

inline UndirectedGraph letters(std::size_t n, std::initializer_list<const char*> edges)
{
    std::string text = "graph " + std::to_string(n) + "\n";
    for (std::size_t v = 0; v < n; ++v)
        text += std::string(1, static_cast<char>('a' + v)) + "\n";
    for (const char* e : edges)
        text += std::string(1, e[0]) + " " + std::string(1, e[1]) + "\n";
    return morality::io::parse_graph(text);
}

/// Union of the cliques abc, acd, bce, cde, def.
inline UndirectedGraph g2()
{
    return letters(6, {"ab", "ac", "bc", "ad", "cd", "be", "ce", "de", "df", "ef"});
}

/// Moral, not chordal, not a web.
inline UndirectedGraph g1()
{
    return letters(6, {"ab", "ac", "ad", "ae", "bd", "be", "cd", "df", "ef"});
}

/// g1 without a-b; not moral.
inline UndirectedGraph g0()
{
    return letters(6, {"ac", "ad", "ae", "bd", "be", "cd", "df", "ef"});
}

/// Not moral although both necessary conditions hold.
inline UndirectedGraph g3()
{
    return letters(6, {"ab", "ac", "af", "bd", "be", "cd", "ce", "de"});
}

/// Moral; the elimination procedure succeeds or gets stuck depending on
/// which marked edges go first.
inline UndirectedGraph g4()
{
    return letters(15, {"ab", "bc", "cd", "ad", "cf", "df", "ce", "ef", "dg", "fg", "fi", "hn", "kn", "ln",
                        "kl", "km", "mn", "lo", "no", "hj", "jl", "jk", "il", "ik"});
}

inline UndirectedGraph cycle(std::size_t n)
{
    std::vector<morality::Edge> edges;
    for (morality::Vertex v = 0; v < n; ++v)
        edges.push_back(morality::Edge::canonical(v, static_cast<morality::Vertex>((v + 1) % n)));
    return UndirectedGraph::build(n, edges);
}

inline UndirectedGraph complete(std::size_t n)
{
    std::vector<morality::Edge> edges;
    for (morality::Vertex a = 0; a < n; ++a)
        for (morality::Vertex b = a + 1; b < n; ++b)
            edges.push_back({a, b});
    return UndirectedGraph::build(n, edges);
}

inline morality::Vertex id(const UndirectedGraph& g, const char* name)
{
    return *g.find(name);
}

} // namespace fixtures
