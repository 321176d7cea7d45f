#include "fixtures.hpp"

#include <morality/generators.hpp>
#include <morality/graph.hpp>

#include <gtest/gtest.h>

#include <bit>
#include <map>
#include <set>

using namespace morality;
using fixtures::id;

namespace {

// Brute-force reference: all vertex subsets that are cliques and maximal.
std::vector<Clique> brute_maximal_cliques(const UndirectedGraph& g)
{
    const auto n = g.vertex_count();
    std::vector<std::uint32_t> cliques;
    for (std::uint32_t s = 1; s < (1U << n); ++s) {
        bool ok = true;
        for (Vertex a = 0; a < n && ok; ++a)
            for (Vertex b = a + 1; b < n && ok; ++b)
                if ((s >> a & 1U) && (s >> b & 1U) && !g.adjacent(a, b))
                    ok = false;
        if (ok)
            cliques.push_back(s);
    }
    std::vector<Clique> out;
    for (auto s : cliques) {
        bool maximal = std::none_of(cliques.begin(), cliques.end(), [&](std::uint32_t t) { return t != s && (t & s) == s; });
        if (!maximal)
            continue;
        Clique c;
        for (Vertex v = 0; v < n; ++v)
            if (s >> v & 1U)
                c.members.push_back(v);
        out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Reference hole test: some vertex subset of size >= 4 induces a cycle.
bool has_hole(const UndirectedGraph& g)
{
    const auto n = g.vertex_count();
    for (std::uint32_t s = 0; s < (1U << n); ++s) {
        if (std::popcount(s) < 4)
            continue;
        bool two_regular = true;
        Vertex start = 0;
        for (Vertex v = 0; v < n && two_regular; ++v) {
            if (!(s >> v & 1U))
                continue;
            start = v;
            int deg = 0;
            for (Vertex w : g.neighbors(v))
                deg += (s >> w & 1U) ? 1 : 0;
            two_regular = deg == 2;
        }
        if (!two_regular)
            continue;
        // Connected 2-regular induced subgraph = chordless cycle.
        std::uint32_t seen = 1U << start;
        std::vector<Vertex> stack{start};
        while (!stack.empty()) {
            const Vertex x = stack.back();
            stack.pop_back();
            for (Vertex w : g.neighbors(x))
                if ((s >> w & 1U) && !(seen >> w & 1U)) {
                    seen |= 1U << w;
                    stack.push_back(w);
                }
        }
        if (seen == s)
            return true;
    }
    return false;
}

} // namespace

TEST(BuildGraph, PathHasDegreeSequence121)
{
    auto g = UndirectedGraph::build(3, {{0, 1}, {1, 2}});
    EXPECT_EQ(g.edge_count(), 2U);
    EXPECT_EQ(g.degree(0), 1U);
    EXPECT_EQ(g.degree(1), 2U);
    EXPECT_EQ(g.degree(2), 1U);
}

TEST(BuildGraph, EmptyGraph)
{
    auto g = UndirectedGraph::build(0, {});
    EXPECT_EQ(g.vertex_count(), 0U);
    EXPECT_EQ(g.edge_count(), 0U);
}

TEST(BuildGraph, CliqueUnionHasTenEdges)
{
    auto g = fixtures::g2();
    EXPECT_EQ(g.vertex_count(), 6U);
    EXPECT_EQ(g.edge_count(), 10U);
}

TEST(BuildGraph, DuplicatesCollapseAndAdjacencyIsSymmetric)
{
    auto g = UndirectedGraph::build(4, {{0, 1}, {1, 0}, {2, 3}, {0, 1}});
    EXPECT_EQ(g.edge_count(), 2U);
    for (Vertex a = 0; a < 4; ++a)
        for (Vertex b = 0; b < 4; ++b)
            EXPECT_EQ(g.adjacent(a, b), g.adjacent(b, a));
    EXPECT_EQ(g.edge(0), (Edge{0, 1}));
}

TEST(BuildGraph, RejectsBadInput)
{
    EXPECT_THROW(UndirectedGraph::build(2, {{0, 2}}), InputError);
    EXPECT_THROW(UndirectedGraph::build(2, {{1, 1}}), InputError);
    EXPECT_THROW(UndirectedGraph::build(2, {{0, 1}}, {"a"}), InputError);
}

TEST(Moralize, ChainKeepsSkeleton)
{
    auto d = Dag::build(3, {{0, 1}, {1, 2}});
    auto g = moralize(d);
    EXPECT_TRUE(g.same_edges(UndirectedGraph::build(3, {{0, 1}, {1, 2}})));
}

TEST(Moralize, VStructureBecomesTriangle)
{
    auto d = Dag::build(3, {{0, 2}, {1, 2}});
    EXPECT_TRUE(moralize(d).same_edges(fixtures::complete(3)));
}

TEST(Moralize, CyclicInputIsAContractViolation)
{
    auto d = Dag::build(3, {{0, 1}, {1, 2}, {2, 0}});
    EXPECT_THROW(moralize(d), ContractViolation);
}

TEST(Moralize, DagForCliqueUnionGivesIt)
{
    // d-e is a marriage for f; every other edge is an arc.
    auto g = fixtures::g2();
    auto v = [&](const char* s) { return id(g, s); };
    auto d = Dag::build(6, {{v("a"), v("b")}, {v("a"), v("c")}, {v("b"), v("c")}, {v("a"), v("d")}, {v("c"), v("d")},
                            {v("b"), v("e")}, {v("c"), v("e")}, {v("d"), v("f")}, {v("e"), v("f")}});
    EXPECT_TRUE(moralize(d).same_edges(g));
    EXPECT_TRUE(is_moral_graph_of(g, d));
}

TEST(IsMoralGraphOf, TriangleAndVStructure)
{
    auto d = Dag::build(3, {{0, 2}, {1, 2}});
    EXPECT_TRUE(is_moral_graph_of(fixtures::complete(3), d));
    EXPECT_FALSE(is_moral_graph_of(UndirectedGraph::build(3, {{0, 1}, {1, 2}}), d));
}

TEST(IsMoralGraphOf, NoOrientationOfFourCycleWorks)
{
    auto c4 = fixtures::cycle(4);
    std::size_t acyclic = 0;
    for (int mask = 0; mask < 81; ++mask) {
        std::vector<Arc> arcs;
        int m = mask;
        for (const auto& e : c4.edges()) {
            const int digit = m % 3;
            m /= 3;
            if (digit == 0)
                arcs.push_back({e.u, e.v});
            else if (digit == 1)
                arcs.push_back({e.v, e.u});
        }
        auto d = Dag::build(4, arcs);
        if (!is_acyclic(d).acyclic)
            continue;
        ++acyclic;
        EXPECT_FALSE(is_moral_graph_of(c4, d));
    }
    EXPECT_EQ(acyclic, 79U); // 81 minus the two directed 4-cycles
}

TEST(IsMoralGraphOf, VertexMismatchIsInputError)
{
    EXPECT_THROW(is_moral_graph_of(fixtures::complete(3), Dag::build(4, {})), InputError);
}

TEST(MaximalCliques, Examples)
{
    EXPECT_EQ(maximal_cliques(fixtures::complete(3)), (std::vector<Clique>{{{0, 1, 2}}}));
    auto g = fixtures::g2();
    std::vector<std::string> names;
    for (const auto& c : maximal_cliques(g)) {
        std::string s;
        for (Vertex v : c.members)
            s += g.name(v);
        names.push_back(s);
    }
    EXPECT_EQ(names, (std::vector<std::string>{"abc", "acd", "bce", "cde", "def"}));
    auto c4 = maximal_cliques(fixtures::cycle(4));
    EXPECT_EQ(c4, (std::vector<Clique>{{{0, 1}}, {{0, 3}}, {{1, 2}}, {{2, 3}}}));
}

TEST(MaximalCliques, MatchesSubsetEnumerationUpToSevenVertices)
{
    for (std::size_t n = 1; n <= 5; ++n)
        for (std::uint64_t mask = 0; mask < (1ULL << (n * (n - 1) / 2)); ++mask) {
            auto g = gen::graph_from_mask(n, mask);
            ASSERT_EQ(maximal_cliques(g), brute_maximal_cliques(g)) << "n=" << n << " mask=" << mask;
        }
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        auto g = gen::gnp(6 + seed % 2, 0.2 + 0.6 * static_cast<double>(seed % 7) / 6.0, seed);
        ASSERT_EQ(maximal_cliques(g), brute_maximal_cliques(g)) << "seed=" << seed;
    }
}

TEST(IsChordal, Examples)
{
    auto tree = UndirectedGraph::build(5, {{0, 1}, {0, 2}, {2, 3}, {2, 4}});
    EXPECT_TRUE(is_chordal(tree).chordal);
    EXPECT_FALSE(is_chordal(fixtures::cycle(4)).chordal);
    EXPECT_TRUE(is_chordal(UndirectedGraph::build(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}})).chordal);
}

TEST(IsChordal, EliminationOrderIsPerfect)
{
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        auto g = gen::random_chordal(12, 0.5, seed);
        auto r = is_chordal(g);
        ASSERT_TRUE(r.chordal);
        std::vector<std::size_t> pos(g.vertex_count());
        for (std::size_t i = 0; i < r.elimination_order.size(); ++i)
            pos[r.elimination_order[i]] = i;
        for (Vertex v = 0; v < g.vertex_count(); ++v) {
            std::vector<Vertex> later;
            for (Vertex w : g.neighbors(v))
                if (pos[w] > pos[v])
                    later.push_back(w);
            EXPECT_TRUE(is_clique(g, later));
        }
    }
}

TEST(IsChordal, AgreesWithHoleSearchUpToSevenVertices)
{
    for (std::size_t n = 1; n <= 5; ++n)
        for (std::uint64_t mask = 0; mask < (1ULL << (n * (n - 1) / 2)); ++mask) {
            auto g = gen::graph_from_mask(n, mask);
            ASSERT_EQ(is_chordal(g).chordal, !has_hole(g)) << "n=" << n << " mask=" << mask;
        }
    for (std::uint64_t seed = 1; seed <= 400; ++seed) {
        auto g = gen::gnp(6 + seed % 2, 0.25 + 0.5 * static_cast<double>(seed % 5) / 4.0, seed);
        ASSERT_EQ(is_chordal(g).chordal, !has_hole(g)) << "seed=" << seed;
    }
}

TEST(ChordlessCycles, Examples)
{
    auto c4 = chordless_cycles(fixtures::cycle(4));
    ASSERT_EQ(c4.cycles.size(), 1U);
    EXPECT_EQ(c4.cycles[0], (std::vector<Vertex>{0, 1, 2, 3}));
    EXPECT_FALSE(c4.truncated);

    EXPECT_TRUE(chordless_cycles(fixtures::complete(5)).cycles.empty());

    auto c5 = chordless_cycles(fixtures::cycle(5), 4, 4);
    EXPECT_TRUE(c5.cycles.empty());
    EXPECT_TRUE(c5.truncated);
    EXPECT_THROW(chordless_cycles(fixtures::cycle(5), 4, 3), InputError);
}

TEST(ChordlessCycles, FindsEveryCycleGraph)
{
    for (std::size_t n = 4; n <= 9; ++n) {
        auto scan = chordless_cycles(fixtures::cycle(n), 4, n);
        EXPECT_EQ(scan.cycles.size(), 1U) << n;
        EXPECT_FALSE(scan.truncated);
    }
}

TEST(ChordlessCycles, NoneInChordalGraphs)
{
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        auto scan = chordless_cycles(gen::random_chordal(15, 0.6, seed), 4, 15);
        EXPECT_TRUE(scan.cycles.empty());
        EXPECT_FALSE(scan.truncated);
    }
}

TEST(ChordlessCycles, FrozenCountsFromNetworkx)
{
    // Petersen graph: 12 chordless 5-cycles and 10 chordless 6-cycles.
    std::vector<Edge> petersen;
    for (Vertex i = 0; i < 5; ++i) {
        petersen.push_back(Edge::canonical(i, (i + 1) % 5));
        petersen.push_back(Edge::canonical(i, i + 5));
        petersen.push_back(Edge::canonical(i + 5, (i + 2) % 5 + 5));
    }
    auto scan = chordless_cycles(UndirectedGraph::build(10, petersen), 4, 10);
    std::map<std::size_t, std::size_t> by_len;
    for (const auto& c : scan.cycles)
        ++by_len[c.size()];
    EXPECT_EQ(by_len, (std::map<std::size_t, std::size_t>{{5, 12}, {6, 10}}));

    // 3-cube: six 4-cycles and four 6-cycles.
    std::vector<Edge> cube;
    for (Vertex v = 0; v < 8; ++v)
        for (Vertex bit = 1; bit < 8; bit <<= 1)
            if (v < (v ^ bit))
                cube.push_back({v, v ^ bit});
    auto q3 = chordless_cycles(UndirectedGraph::build(8, cube), 4, 8);
    by_len.clear();
    for (const auto& c : q3.cycles)
        ++by_len[c.size()];
    EXPECT_EQ(by_len, (std::map<std::size_t, std::size_t>{{4, 6}, {6, 4}}));
}

TEST(ChordlessCycles, TruncationFlagIsExact)
{
    auto scan = chordless_cycles(fixtures::cycle(8), 4, 7);
    EXPECT_TRUE(scan.truncated);
    // A long path that never closes is not a truncation.
    auto path = UndirectedGraph::build(10, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 8}, {8, 9}});
    EXPECT_FALSE(chordless_cycles(path, 4, 4).truncated);
}

TEST(IsAcyclic, Examples)
{
    auto chain = is_acyclic(Dag::build(3, {{0, 1}, {1, 2}}));
    EXPECT_TRUE(chain.acyclic);
    EXPECT_EQ(chain.order, (std::vector<Vertex>{0, 1, 2}));
    EXPECT_FALSE(is_acyclic(Dag::build(3, {{0, 1}, {1, 2}, {2, 0}})).acyclic);
    EXPECT_TRUE(is_acyclic(Dag::build(0, {})).acyclic);
}

TEST(Dag, RejectsAntiparallelArcs)
{
    EXPECT_THROW(Dag::build(2, {{0, 1}, {1, 0}}), InputError);
}

TEST(Properties, RandomDagsVerifyAgainstTheirMoralGraph)
{
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const std::size_t n = 1 + seed % 15;
        auto d = gen::random_dag(n, 0.1 + 0.05 * static_cast<double>(seed % 10), seed);
        auto g = moralize(d);
        ASSERT_TRUE(is_moral_graph_of(g, d));
        // Every arc survives; the extra edges are exactly the married pairs.
        std::set<Edge> skeleton;
        for (const auto& a : d.arcs()) {
            EXPECT_TRUE(g.adjacent(a.from, a.to));
            skeleton.insert(Edge::canonical(a.from, a.to));
        }
        std::set<Edge> married;
        for (Vertex v = 0; v < n; ++v) {
            const auto& ps = d.parents(v);
            for (std::size_t i = 0; i < ps.size(); ++i)
                for (std::size_t j = i + 1; j < ps.size(); ++j)
                    if (!skeleton.count(Edge::canonical(ps[i], ps[j])))
                        married.insert(Edge::canonical(ps[i], ps[j]));
        }
        EXPECT_EQ(g.edge_count() - skeleton.size(), married.size());
    }
}
