#pragma once

// Undirected graphs, dags and the structural primitives the rest of the
// library is built on: moralization, witness verification, maximal cliques,
// chordality, chordless-cycle enumeration and acyclicity.

#include "common.hpp"

#include <algorithm>
#include <cstddef>
#include <deque>
#include <functional>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace morality {

class UndirectedGraph {
public:
    UndirectedGraph() = default;

    /// Builds a canonical graph. Duplicate edges collapse; out-of-range
    /// endpoints and self-loops throw InputError. `names` is either empty or
    /// holds one distinct name per vertex.
    static UndirectedGraph build(std::size_t n, std::span<const Edge> edges,
                                 std::vector<std::string> names = {})
    {
        if (!names.empty() && names.size() != n)
            throw InputError("name table size " + std::to_string(names.size()) +
                             " does not match vertex count " + std::to_string(n));
        UndirectedGraph g;
        g.adj_.assign(n, {});
        g.incident_.assign(n, {});
        g.bits_.assign(n, VertexSet(n));
        g.names_ = std::move(names);
        for (const auto& e : edges) {
            if (e.u >= n || e.v >= n)
                throw InputError("edge endpoint out of range: " + std::to_string(e.u) + " " +
                                 std::to_string(e.v));
            if (e.u == e.v)
                throw InputError("self-loop on vertex " + std::to_string(e.u));
            g.edges_.push_back(Edge::canonical(e.u, e.v));
        }
        std::sort(g.edges_.begin(), g.edges_.end());
        g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());
        for (const auto& e : g.edges_) {
            g.adj_[e.u].push_back(e.v);
            g.adj_[e.v].push_back(e.u);
            g.bits_[e.u].set(e.v);
            g.bits_[e.v].set(e.u);
        }
        for (auto& list : g.adj_)
            std::sort(list.begin(), list.end());
        for (Vertex v = 0; v < n; ++v) {
            g.incident_[v].reserve(g.adj_[v].size());
            for (Vertex w : g.adj_[v])
                g.incident_[v].push_back(*g.edge_index(v, w));
        }
        return g;
    }

    static UndirectedGraph build(std::size_t n, std::initializer_list<Edge> edges,
                                 std::vector<std::string> names = {})
    {
        return build(n, std::span<const Edge>(edges.begin(), edges.size()), std::move(names));
    }

    [[nodiscard]] std::size_t vertex_count() const noexcept { return adj_.size(); }
    [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] const Edge& edge(std::size_t index) const { return edges_[index]; }

    /// Sorted neighbor list.
    [[nodiscard]] const std::vector<Vertex>& neighbors(Vertex v) const { return adj_[v]; }
    /// Edge indices aligned with `neighbors(v)`.
    [[nodiscard]] const std::vector<std::size_t>& incident_edges(Vertex v) const
    {
        return incident_[v];
    }
    [[nodiscard]] const VertexSet& neighbor_set(Vertex v) const { return bits_[v]; }
    [[nodiscard]] std::size_t degree(Vertex v) const { return adj_[v].size(); }

    [[nodiscard]] bool adjacent(Vertex a, Vertex b) const
    {
        return a < adj_.size() && b < adj_.size() && bits_[a].test(b);
    }

    [[nodiscard]] std::optional<std::size_t> edge_index(Vertex a, Vertex b) const
    {
        const auto e = Edge::canonical(a, b);
        auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
        if (it == edges_.end() || *it != e)
            return std::nullopt;
        return static_cast<std::size_t>(it - edges_.begin());
    }

    [[nodiscard]] bool has_names() const noexcept { return !names_.empty(); }
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
    [[nodiscard]] std::string name(Vertex v) const
    {
        return names_.empty() ? std::to_string(v) : names_[v];
    }
    [[nodiscard]] std::optional<Vertex> find(std::string_view label) const
    {
        for (Vertex v = 0; v < names_.size(); ++v)
            if (names_[v] == label)
                return v;
        return std::nullopt;
    }

    /// Edge-for-edge equality over the same vertex count (names ignored).
    [[nodiscard]] bool same_edges(const UndirectedGraph& other) const
    {
        return vertex_count() == other.vertex_count() && edges_ == other.edges_;
    }

private:
    std::vector<std::vector<Vertex>> adj_;
    std::vector<std::vector<std::size_t>> incident_;
    std::vector<VertexSet> bits_;
    std::vector<Edge> edges_;
    std::vector<std::string> names_;
};

class Dag {
public:
    Dag() = default;

    /// Builds a directed graph. Acyclicity is not enforced here; use
    /// `is_acyclic`. Duplicate arcs collapse, antiparallel pairs are rejected.
    static Dag build(std::size_t n, std::span<const Arc> arcs, std::vector<std::string> names = {})
    {
        if (!names.empty() && names.size() != n)
            throw InputError("name table size does not match vertex count");
        Dag d;
        d.parents_.assign(n, {});
        d.children_.assign(n, {});
        d.names_ = std::move(names);
        for (const auto& a : arcs) {
            if (a.from >= n || a.to >= n)
                throw InputError("arc endpoint out of range: " + std::to_string(a.from) + " -> " +
                                 std::to_string(a.to));
            if (a.from == a.to)
                throw InputError("self-loop on vertex " + std::to_string(a.from));
            d.arcs_.push_back(a);
        }
        std::sort(d.arcs_.begin(), d.arcs_.end());
        d.arcs_.erase(std::unique(d.arcs_.begin(), d.arcs_.end()), d.arcs_.end());
        for (const auto& a : d.arcs_) {
            if (std::binary_search(d.arcs_.begin(), d.arcs_.end(), Arc{a.to, a.from}))
                throw InputError("antiparallel arcs between " + std::to_string(a.from) + " and " +
                                 std::to_string(a.to));
            d.children_[a.from].push_back(a.to);
            d.parents_[a.to].push_back(a.from);
        }
        for (auto& p : d.parents_)
            std::sort(p.begin(), p.end());
        return d;
    }

    static Dag build(std::size_t n, std::initializer_list<Arc> arcs, std::vector<std::string> names = {})
    {
        return build(n, std::span<const Arc>(arcs.begin(), arcs.size()), std::move(names));
    }

    [[nodiscard]] std::size_t vertex_count() const noexcept { return parents_.size(); }
    [[nodiscard]] std::size_t arc_count() const noexcept { return arcs_.size(); }
    [[nodiscard]] const std::vector<Arc>& arcs() const noexcept { return arcs_; }
    [[nodiscard]] const std::vector<Vertex>& parents(Vertex v) const { return parents_[v]; }
    [[nodiscard]] const std::vector<Vertex>& children(Vertex v) const { return children_[v]; }
    [[nodiscard]] bool has_arc(Vertex from, Vertex to) const
    {
        return std::binary_search(arcs_.begin(), arcs_.end(), Arc{from, to});
    }

    [[nodiscard]] bool has_names() const noexcept { return !names_.empty(); }
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
    [[nodiscard]] std::string name(Vertex v) const
    {
        return names_.empty() ? std::to_string(v) : names_[v];
    }

private:
    std::vector<Arc> arcs_;
    std::vector<std::vector<Vertex>> parents_;
    std::vector<std::vector<Vertex>> children_;
    std::vector<std::string> names_;
};

/// Member set of a clique, kept sorted.
struct Clique {
    std::vector<Vertex> members;

    [[nodiscard]] bool contains(Vertex v) const
    {
        return std::binary_search(members.begin(), members.end(), v);
    }
    [[nodiscard]] std::size_t size() const noexcept { return members.size(); }

    auto operator<=>(const Clique&) const = default;
};

inline UndirectedGraph build_graph(std::size_t n, std::span<const Edge> edges,
                                   std::vector<std::string> names = {})
{
    return UndirectedGraph::build(n, edges, std::move(names));
}

struct TopologicalResult {
    bool acyclic = false;
    std::vector<Vertex> order; ///< populated only when acyclic
};

/// Kahn's algorithm; among ready vertices the smallest id goes first.
inline TopologicalResult is_acyclic(const Dag& d)
{
    const auto n = d.vertex_count();
    std::vector<std::size_t> indeg(n);
    for (Vertex v = 0; v < n; ++v)
        indeg[v] = d.parents(v).size();
    std::priority_queue<Vertex, std::vector<Vertex>, std::greater<>> ready;
    for (Vertex v = 0; v < n; ++v)
        if (indeg[v] == 0)
            ready.push(v);
    TopologicalResult result;
    result.order.reserve(n);
    while (!ready.empty()) {
        const Vertex v = ready.top();
        ready.pop();
        result.order.push_back(v);
        for (Vertex c : d.children(v))
            if (--indeg[c] == 0)
                ready.push(c);
    }
    result.acyclic = result.order.size() == n;
    if (!result.acyclic)
        result.order.clear();
    return result;
}

/// Marries every pair of parents sharing a child and drops orientations.
inline UndirectedGraph moralize(const Dag& d)
{
    if (!is_acyclic(d).acyclic)
        throw ContractViolation("moralize: input contains a directed cycle");
    std::vector<Edge> edges;
    for (const auto& a : d.arcs())
        edges.push_back(Edge::canonical(a.from, a.to));
    for (Vertex v = 0; v < d.vertex_count(); ++v) {
        const auto& ps = d.parents(v);
        for (std::size_t i = 0; i < ps.size(); ++i)
            for (std::size_t j = i + 1; j < ps.size(); ++j)
                edges.push_back(Edge::canonical(ps[i], ps[j]));
    }
    return UndirectedGraph::build(d.vertex_count(), edges, d.names());
}

/// True iff `moralize(d)` equals `g` edge for edge. Scans parent pairs and
/// stops at the first arc or marriage missing from `g`, then checks that no
/// edge of `g` is left uncovered.
inline bool is_moral_graph_of(const UndirectedGraph& g, const Dag& d)
{
    if (g.vertex_count() != d.vertex_count())
        throw InputError("is_moral_graph_of: vertex sets differ (" + std::to_string(g.vertex_count()) +
                         " vs " + std::to_string(d.vertex_count()) + ")");
    if (!is_acyclic(d).acyclic)
        throw ContractViolation("is_moral_graph_of: candidate contains a directed cycle");
    std::vector<bool> covered(g.edge_count(), false);
    std::size_t uncovered = g.edge_count();
    auto cover = [&](Vertex a, Vertex b) {
        const auto idx = g.edge_index(a, b);
        if (!idx)
            return false;
        if (!covered[*idx]) {
            covered[*idx] = true;
            --uncovered;
        }
        return true;
    };
    for (const auto& a : d.arcs())
        if (!cover(a.from, a.to))
            return false;
    for (Vertex v = 0; v < d.vertex_count(); ++v) {
        const auto& ps = d.parents(v);
        for (std::size_t i = 0; i < ps.size(); ++i)
            for (std::size_t j = i + 1; j < ps.size(); ++j)
                if (!cover(ps[i], ps[j]))
                    return false;
    }
    return uncovered == 0;
}

namespace detail {

inline std::vector<Vertex> members_of(const VertexSet& s)
{
    std::vector<Vertex> out;
    for (auto i = s.find_first(); i != VertexSet::npos; i = s.find_next(i))
        out.push_back(static_cast<Vertex>(i));
    return out;
}

inline void bron_kerbosch(const UndirectedGraph& g, std::vector<Vertex>& r, VertexSet p, VertexSet x,
                          std::vector<Clique>& out)
{
    if (p.none() && x.none()) {
        Clique c{r};
        std::sort(c.members.begin(), c.members.end());
        out.push_back(std::move(c));
        return;
    }
    // Tomita pivot: the vertex of P | X with the most neighbors in P.
    Vertex pivot = 0;
    std::size_t best = 0;
    bool have_pivot = false;
    const VertexSet px = p | x;
    for (auto u = px.find_first(); u != VertexSet::npos; u = px.find_next(u)) {
        const auto k = (p & g.neighbor_set(static_cast<Vertex>(u))).count();
        if (!have_pivot || k > best) {
            pivot = static_cast<Vertex>(u);
            best = k;
            have_pivot = true;
        }
    }
    const VertexSet candidates = p - g.neighbor_set(pivot);
    for (auto v = candidates.find_first(); v != VertexSet::npos; v = candidates.find_next(v)) {
        const auto& nv = g.neighbor_set(static_cast<Vertex>(v));
        r.push_back(static_cast<Vertex>(v));
        bron_kerbosch(g, r, p & nv, x & nv, out);
        r.pop_back();
        p.reset(v);
        x.set(v);
    }
}

} // namespace detail

/// Inclusion-maximal cliques, each once, sorted lexicographically. Isolated
/// vertices appear as singleton cliques.
inline std::vector<Clique> maximal_cliques(const UndirectedGraph& g)
{
    std::vector<Clique> out;
    const auto n = g.vertex_count();
    if (n == 0)
        return out;
    VertexSet p(n);
    p.set();
    std::vector<Vertex> r;
    detail::bron_kerbosch(g, r, p, VertexSet(n), out);
    std::sort(out.begin(), out.end());
    return out;
}

inline bool is_clique(const UndirectedGraph& g, std::span<const Vertex> members)
{
    for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = i + 1; j < members.size(); ++j)
            if (!g.adjacent(members[i], members[j]))
                return false;
    return true;
}

struct ChordalityResult {
    bool chordal = false;
    /// Perfect elimination order when chordal: every vertex's neighbors that
    /// come later in the order form a clique.
    std::vector<Vertex> elimination_order;
};

/// Maximum cardinality search followed by the standard PEO check.
inline ChordalityResult is_chordal(const UndirectedGraph& g)
{
    const auto n = g.vertex_count();
    std::vector<std::size_t> weight(n, 0);
    std::vector<bool> numbered(n, false);
    std::vector<Vertex> visit;
    visit.reserve(n);
    for (std::size_t step = 0; step < n; ++step) {
        Vertex best = 0;
        bool found = false;
        for (Vertex v = 0; v < n; ++v)
            if (!numbered[v] && (!found || weight[v] > weight[best])) {
                best = v;
                found = true;
            }
        numbered[best] = true;
        visit.push_back(best);
        for (Vertex w : g.neighbors(best))
            if (!numbered[w])
                ++weight[w];
    }
    std::vector<Vertex> peo(visit.rbegin(), visit.rend());
    std::vector<std::size_t> position(n);
    for (std::size_t i = 0; i < n; ++i)
        position[peo[i]] = i;
    for (Vertex v : peo) {
        std::optional<Vertex> first_later;
        for (Vertex w : g.neighbors(v))
            if (position[w] > position[v] && (!first_later || position[w] < position[*first_later]))
                first_later = w;
        if (!first_later)
            continue;
        for (Vertex w : g.neighbors(v))
            if (position[w] > position[v] && w != *first_later && !g.adjacent(*first_later, w))
                return {};
    }
    return {true, std::move(peo)};
}

struct ChordlessCycleScan {
    std::vector<std::vector<Vertex>> cycles;
    bool truncated = false;  ///< some chordless cycle is longer than the cap
    bool work_limited = false; ///< enumeration stopped at the work limit
};

inline constexpr std::size_t default_cycle_cap = 12;

/// Enumerates chordless cycles with `min_len <= length <= max_len`, each once
/// in canonical form (smallest vertex first, second vertex smaller than the
/// last). `visit` returns false to stop early. `truncated` in the result is
/// exact: it is set iff a chordless cycle longer than `max_len` exists (only
/// decided while the scan runs to completion). `work_limit` bounds path
/// extensions; hitting it sets `work_limited` and `truncated`.
template <typename Visitor>
ChordlessCycleScan scan_chordless_cycles(const UndirectedGraph& g, std::size_t min_len,
                                         std::size_t max_len, Visitor&& visit,
                                         std::size_t work_limit = 0)
{
    if (max_len < 4)
        throw InputError("chordless cycle cap must be at least 4");
    ChordlessCycleScan scan;
    const auto n = g.vertex_count();
    std::vector<Vertex> path;
    std::vector<int> interior_hits(n, 0); // adjacency count to p1..p_{k-1}
    std::vector<bool> on_path(n, false);
    std::size_t work = 0;
    bool stop = false;

    auto longer_cycle_exists = [&](Vertex s) {
        // Is there an induced path from the path's tail back to s through
        // unused vertices > s that avoid the interior's neighborhood?
        const Vertex tail = path.back();
        std::vector<bool> seen(n, false);
        std::deque<Vertex> queue{tail};
        seen[tail] = true;
        while (!queue.empty()) {
            const Vertex x = queue.front();
            queue.pop_front();
            for (Vertex w : g.neighbors(x)) {
                if (w == s && x != tail)
                    return true;
                if (w <= s || seen[w] || on_path[w] || interior_hits[w] != 0)
                    continue;
                seen[w] = true;
                queue.push_back(w);
            }
        }
        return false;
    };

    std::function<void(Vertex)> extend = [&](Vertex s) {
        const Vertex tail = path.back();
        for (Vertex w : g.neighbors(tail)) {
            if (stop)
                return;
            if (w <= s || on_path[w] || interior_hits[w] != 0)
                continue;
            if (work_limit != 0 && ++work > work_limit) {
                scan.work_limited = true;
                scan.truncated = true;
                stop = true;
                return;
            }
            if (g.adjacent(w, s)) {
                // w closes the cycle; it is never extended through.
                const auto len = path.size() + 1;
                if (path.size() >= 3 && len >= min_len && path[1] < w) {
                    std::vector<Vertex> cycle(path);
                    cycle.push_back(w);
                    if (!visit(cycle)) {
                        stop = true;
                        return;
                    }
                }
                continue;
            }
            // Push w; the old tail becomes interior unless it is s itself.
            const bool tail_interior = path.size() >= 2;
            if (tail_interior)
                for (Vertex x : g.neighbors(tail))
                    ++interior_hits[x];
            path.push_back(w);
            on_path[w] = true;
            if (path.size() >= max_len) {
                if (!scan.truncated) {
                    // The new tail's neighbors are not interior yet; treat w as tail.
                    if (longer_cycle_exists(s))
                        scan.truncated = true;
                }
            } else {
                extend(s);
            }
            on_path[w] = false;
            path.pop_back();
            if (tail_interior)
                for (Vertex x : g.neighbors(tail))
                    --interior_hits[x];
        }
    };

    for (Vertex s = 0; s < n && !stop; ++s) {
        path.assign(1, s);
        on_path[s] = true;
        for (Vertex p1 : g.neighbors(s)) {
            if (stop)
                break;
            if (p1 <= s)
                continue;
            path.push_back(p1);
            on_path[p1] = true;
            extend(s);
            on_path[p1] = false;
            path.pop_back();
        }
        on_path[s] = false;
    }
    return scan;
}

inline ChordlessCycleScan chordless_cycles(const UndirectedGraph& g, std::size_t min_len = 4,
                                           std::size_t max_len = default_cycle_cap,
                                           std::size_t work_limit = 0)
{
    std::vector<std::vector<Vertex>> found;
    auto scan = scan_chordless_cycles(
        g, min_len, max_len,
        [&](const std::vector<Vertex>& c) {
            found.push_back(c);
            return true;
        },
        work_limit);
    scan.cycles = std::move(found);
    return scan;
}

} // namespace morality
