#pragma once

// Exact morality decision. Every edge is either oriented or deleted; a
// deleted edge needs a common child of its endpoints, parents of one child
// must be adjacent, and the orientation must be acyclic. The search keeps one
// domain per edge and propagates to fixpoint after every decision.

#include "graph.hpp"
#include "screens.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <chrono>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>
#include <vector>

namespace morality {

enum class Verdict { Moral, NotMoral, Unknown };

inline std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::Moral: return "Moral";
    case Verdict::NotMoral: return "NotMoral";
    case Verdict::Unknown: return "Unknown";
    }
    return "?";
}

/// Domain bits for one edge {u, v} with u < v.
namespace dom {
inline constexpr std::uint8_t forward = 1;  ///< u -> v
inline constexpr std::uint8_t backward = 2; ///< v -> u
inline constexpr std::uint8_t deleted = 4;
inline constexpr std::uint8_t all = 7;
} // namespace dom

namespace detail {

/// Square bit matrix; row r is a bitset over columns.
class BitMatrix {
public:
    BitMatrix() = default;
    explicit BitMatrix(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

    [[nodiscard]] bool test(std::size_t r, std::size_t c) const
    {
        return bits_[r * words_ + c / 64] >> (c % 64) & 1U;
    }
    void set(std::size_t r, std::size_t c) { bits_[r * words_ + c / 64] |= std::uint64_t{1} << (c % 64); }
    [[nodiscard]] const std::uint64_t* row(std::size_t r) const { return bits_.data() + r * words_; }
    void or_into(std::size_t r, const std::vector<std::uint64_t>& src)
    {
        auto* dst = bits_.data() + r * words_;
        for (std::size_t w = 0; w < words_; ++w)
            dst[w] |= src[w];
    }
    [[nodiscard]] std::size_t words() const noexcept { return words_; }

    template <typename F>
    static void for_each(const std::vector<std::uint64_t>& set, F&& f)
    {
        for (std::size_t w = 0; w < set.size(); ++w)
            for (auto word = set[w]; word != 0; word &= word - 1)
                f(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
    }

private:
    std::size_t n_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
};

/// Per-graph data shared by every copy of a search state.
struct SearchStructure {
    struct Common {
        Vertex c;
        std::size_t eu; ///< edge {u, c}
        std::size_t ev; ///< edge {v, c}
    };

    UndirectedGraph graph; ///< owned copy, so states outlive the caller's graph
    std::vector<std::vector<Common>> common;            ///< per edge: common neighbors of its endpoints
    std::vector<std::array<std::size_t, 4>> clauses;    ///< chordless 4-cycles: some edge is deleted
    std::vector<std::vector<std::size_t>> clauses_of;   ///< per edge: clauses containing it

    explicit SearchStructure(const UndirectedGraph& input) : graph(input)
    {
        const auto& g = graph;
        common.resize(g.edge_count());
        for (std::size_t e = 0; e < g.edge_count(); ++e) {
            const auto [u, v] = g.edge(e);
            const auto& nu = g.neighbors(u);
            const auto& nv = g.neighbors(v);
            std::size_t i = 0, j = 0;
            while (i < nu.size() && j < nv.size()) {
                if (nu[i] < nv[j])
                    ++i;
                else if (nv[j] < nu[i])
                    ++j;
                else {
                    common[e].push_back({nu[i], g.incident_edges(u)[i], g.incident_edges(v)[j]});
                    ++i;
                    ++j;
                }
            }
        }
        clauses_of.resize(g.edge_count());
    }

    /// Adds one clause per chordless 4-cycle a-b-c-d (a smallest, b < d).
    void add_four_cycle_clauses()
    {
        const auto& g = graph;
        for (Vertex a = 0; a < g.vertex_count(); ++a) {
            const auto& na = g.neighbors(a);
            for (std::size_t i = 0; i < na.size(); ++i) {
                const Vertex b = na[i];
                if (b < a)
                    continue;
                for (std::size_t j = i + 1; j < na.size(); ++j) {
                    const Vertex d = na[j];
                    if (g.adjacent(b, d))
                        continue;
                    const auto shared = g.neighbor_set(b) & g.neighbor_set(d);
                    for (auto c = shared.find_first(); c != VertexSet::npos; c = shared.find_next(c)) {
                        if (c <= a || g.adjacent(a, static_cast<Vertex>(c)))
                            continue;
                        const auto cv = static_cast<Vertex>(c);
                        std::array<std::size_t, 4> cl{*g.edge_index(a, b), *g.edge_index(b, cv),
                                                      *g.edge_index(cv, d), *g.edge_index(d, a)};
                        for (auto e : cl)
                            clauses_of[e].push_back(clauses.size());
                        clauses.push_back(cl);
                    }
                }
            }
        }
    }
};

} // namespace detail

class PartialOrientation;
inline bool propagate(PartialOrientation& state);

/// Search state: surviving dispositions per edge plus the transitive closure
/// of the arcs fixed so far. Copyable; copies share the per-graph structure.
class PartialOrientation {
public:
    explicit PartialOrientation(const UndirectedGraph& g, bool four_cycle_clauses = true)
    {
        auto s = std::make_shared<detail::SearchStructure>(g);
        if (four_cycle_clauses)
            s->add_four_cycle_clauses();
        init(std::move(s));
    }

    [[nodiscard]] const UndirectedGraph& graph() const noexcept { return s_->graph; }
    [[nodiscard]] std::size_t clause_count() const noexcept { return s_->clauses.size(); }
    [[nodiscard]] std::uint8_t domain(std::size_t e) const { return dom_[e]; }
    [[nodiscard]] bool conflict() const noexcept { return conflict_; }
    [[nodiscard]] bool is_fixed(std::size_t e) const { return std::has_single_bit(dom_[e]); }

    /// True once every edge has exactly one disposition left.
    [[nodiscard]] bool complete() const
    {
        return std::all_of(dom_.begin(), dom_.end(), [](std::uint8_t d) { return std::has_single_bit(d); });
    }

    /// Keeps only the dispositions in `mask`. Returns false on an empty domain.
    bool restrict(std::size_t e, std::uint8_t mask)
    {
        const std::uint8_t next = dom_[e] & mask;
        if (next == dom_[e])
            return !conflict_;
        dom_[e] = next;
        if (next == 0)
            conflict_ = true;
        queue_.push_back(e);
        return !conflict_;
    }

    /// Requires the arc from -> to. Throws InputError if {from, to} is not an edge.
    bool orient(Vertex from, Vertex to)
    {
        const auto e = index_of(from, to);
        return restrict(e, graph().edge(e).u == from ? dom::forward : dom::backward);
    }

    /// Requires {a, b} to be absent from the dag.
    bool remove(Vertex a, Vertex b) { return restrict(index_of(a, b), dom::deleted); }

    [[nodiscard]] bool allows_arc(Vertex from, Vertex to) const
    {
        const auto e = index_of(from, to);
        return dom_[e] & (graph().edge(e).u == from ? dom::forward : dom::backward);
    }
    [[nodiscard]] bool allows_deletion(Vertex a, Vertex b) const
    {
        return dom_[index_of(a, b)] & dom::deleted;
    }

    /// Arcs fixed so far.
    [[nodiscard]] std::vector<Arc> arcs() const
    {
        std::vector<Arc> out;
        for (std::size_t e = 0; e < dom_.size(); ++e) {
            const auto [u, v] = graph().edge(e);
            if (dom_[e] == dom::forward)
                out.push_back({u, v});
            else if (dom_[e] == dom::backward)
                out.push_back({v, u});
        }
        return out;
    }

    /// Edges fixed as deleted so far.
    [[nodiscard]] std::vector<Edge> deletions() const
    {
        std::vector<Edge> out;
        for (std::size_t e = 0; e < dom_.size(); ++e)
            if (dom_[e] == dom::deleted)
                out.push_back(graph().edge(e));
        return out;
    }

    /// The dag of a complete, conflict-free state.
    [[nodiscard]] Dag to_dag() const
    {
        if (!complete() || conflict_)
            throw ContractViolation("to_dag: orientation is not complete");
        return Dag::build(graph().vertex_count(), arcs(), graph().names());
    }

    /// True if u reaches v along fixed arcs.
    [[nodiscard]] bool reaches(Vertex u, Vertex v) const { return desc_.test(u, v); }

    std::size_t propagations = 0;

private:
    friend bool propagate(PartialOrientation& state);

    void init(std::shared_ptr<detail::SearchStructure> s)
    {
        s_ = std::move(s);
        const auto m = graph().edge_count();
        const auto n = graph().vertex_count();
        dom_.assign(m, dom::all);
        applied_.assign(m, 0);
        anc_ = detail::BitMatrix(n);
        desc_ = detail::BitMatrix(n);
        // Every edge starts dirty so propagation sees each obligation once.
        queue_.resize(m);
        std::iota(queue_.begin(), queue_.end(), std::size_t{0});
        for (std::size_t c = 0; c < s_->clauses.size(); ++c)
            clause_queue_.push_back(c);
    }

    [[nodiscard]] std::size_t index_of(Vertex a, Vertex b) const
    {
        const auto e = graph().edge_index(a, b);
        if (!e)
            throw InputError("no edge between " + graph().name(a) + " and " + graph().name(b));
        return *e;
    }

    bool require_arc(Vertex from, Vertex to, std::size_t e)
    {
        return restrict(e, graph().edge(e).u == from ? dom::forward : dom::backward);
    }
    bool forbid_arc(Vertex from, Vertex to, std::size_t e)
    {
        return restrict(e, graph().edge(e).u == from ? std::uint8_t(dom::all & ~dom::forward)
                                                     : std::uint8_t(dom::all & ~dom::backward));
    }

    /// Folds the fixed arc a -> b into the closure and prunes what it rules out.
    bool apply_arc(Vertex a, Vertex b)
    {
        const auto& g = graph();
        if (a == b || desc_.test(b, a))
            return conflict_ = true, false;
        if (!desc_.test(a, b)) {
            const auto words = anc_.words();
            std::vector<std::uint64_t> up(anc_.row(a), anc_.row(a) + words);
            up[a / 64] |= std::uint64_t{1} << (a % 64);
            std::vector<std::uint64_t> down(desc_.row(b), desc_.row(b) + words);
            down[b / 64] |= std::uint64_t{1} << (b % 64);
            detail::BitMatrix::for_each(down, [&](std::size_t x) { anc_.or_into(x, up); });
            detail::BitMatrix::for_each(up, [&](std::size_t y) { desc_.or_into(y, down); });
            // x reaches y now for x in up, y in down: forbid y -> x.
            bool ok = true;
            detail::BitMatrix::for_each(up, [&](std::size_t x) {
                if (!ok)
                    return;
                const auto& nx = g.neighbors(static_cast<Vertex>(x));
                const auto& ix = g.incident_edges(static_cast<Vertex>(x));
                for (std::size_t k = 0; k < nx.size() && ok; ++k)
                    if (down[nx[k] / 64] >> (nx[k] % 64) & 1U)
                        ok = forbid_arc(nx[k], static_cast<Vertex>(x), ix[k]);
            });
            if (!ok)
                return false;
        }
        // Co-parents must be adjacent: no w non-adjacent to a may point into b.
        const auto& nb = g.neighbors(b);
        const auto& ib = g.incident_edges(b);
        for (std::size_t k = 0; k < nb.size(); ++k) {
            const Vertex w = nb[k];
            if (w != a && !g.adjacent(a, w) && !forbid_arc(w, b, ib[k]))
                return false;
        }
        return true;
    }

    /// Deletion support for edge e = {u, v}: candidates c with u -> c and
    /// v -> c both still possible. No candidate removes the deletion option;
    /// a fixed deletion with one candidate forces both arcs.
    bool check_cover(std::size_t e)
    {
        if (!(dom_[e] & dom::deleted))
            return true;
        const auto [u, v] = graph().edge(e);
        std::size_t count = 0;
        const detail::SearchStructure::Common* last = nullptr;
        for (const auto& cm : s_->common[e]) {
            const bool au = dom_[cm.eu] & (graph().edge(cm.eu).u == u ? dom::forward : dom::backward);
            const bool av = dom_[cm.ev] & (graph().edge(cm.ev).u == v ? dom::forward : dom::backward);
            if (au && av) {
                ++count;
                last = &cm;
                if (count > 1)
                    return true;
            }
        }
        if (count == 0)
            return restrict(e, dom::forward | dom::backward);
        if (dom_[e] == dom::deleted)
            return require_arc(u, last->c, last->eu) && require_arc(v, last->c, last->ev);
        return true;
    }

    bool check_clause(std::size_t c)
    {
        std::size_t open = 0;
        std::size_t which = 0;
        for (auto e : s_->clauses[c]) {
            if (dom_[e] == dom::deleted)
                return true;
            if (dom_[e] & dom::deleted) {
                ++open;
                which = e;
            }
        }
        if (open == 0)
            return conflict_ = true, false;
        if (open == 1)
            return restrict(which, dom::deleted);
        return true;
    }

    std::shared_ptr<const detail::SearchStructure> s_;
    std::vector<std::uint8_t> dom_;
    std::vector<std::uint8_t> applied_;
    detail::BitMatrix anc_;
    detail::BitMatrix desc_;
    std::vector<std::size_t> queue_;
    std::vector<std::size_t> clause_queue_;
    bool conflict_ = false;
};

/// Runs every rule to fixpoint:
///   (a) a deleted edge with one candidate child forces both arcs into it;
///   (b) a deleted edge with no candidate is a conflict;
///   (c) an arc a -> c forbids w -> c for every w not adjacent to a;
///   (d) arcs that would close a directed cycle are removed;
///   (e) two fixed parents of one child that are non-adjacent conflict (via c);
///   plus the chordless 4-cycle rule: some edge of the cycle is deleted.
/// Returns false on conflict.
inline bool propagate(PartialOrientation& st)
{
    const auto& g = st.graph();
    while (!st.conflict_ && (!st.queue_.empty() || !st.clause_queue_.empty())) {
        if (st.queue_.empty()) {
            const auto c = st.clause_queue_.back();
            st.clause_queue_.pop_back();
            if (!st.check_clause(c))
                return false;
            continue;
        }
        const auto e = st.queue_.back();
        st.queue_.pop_back();
        ++st.propagations;
        const auto d = st.dom_[e];
        if (d == 0)
            return st.conflict_ = true, false;
        const auto [u, v] = g.edge(e);
        if (!st.applied_[e] && (d == dom::forward || d == dom::backward)) {
            st.applied_[e] = 1;
            if (!(d == dom::forward ? st.apply_arc(u, v) : st.apply_arc(v, u)))
                return false;
        }
        if (!st.check_cover(e))
            return false;
        // Deletion supports that may use this edge as one of their two arcs.
        for (const auto& cm : st.s_->common[e])
            if (!st.check_cover(cm.eu) || !st.check_cover(cm.ev))
                return false;
        if (!(st.dom_[e] & dom::deleted))
            for (auto c : st.s_->clauses_of[e])
                st.clause_queue_.push_back(c);
    }
    if (st.conflict_) {
        st.queue_.clear();
        st.clause_queue_.clear();
        return false;
    }
    return true;
}

struct DecisionStats {
    std::size_t nodes = 0;
    std::size_t propagations = 0;
    double elapsed_ms = 0.0;
    bool budget_hit = false;
    unsigned workers = 1;
    bool deterministic = true; ///< false in portfolio mode
    std::string settled_by;    ///< "screen", "search" or "brute_force"
};

struct Certificate {
    enum class Kind { ExhaustedSearch, NecessaryCondition };
    Kind kind = Kind::ExhaustedSearch;
    std::string token;
    std::optional<RuleId> rule;
    std::vector<Vertex> cycle;
};

struct Decision {
    Verdict verdict = Verdict::Unknown;
    std::optional<Dag> witness;
    std::optional<Certificate> certificate;
    std::string reason; ///< why Unknown
    DecisionStats stats;
    std::optional<ScreenReport> screen_report;
};

struct DecideConfig {
    std::size_t node_budget = 0;                   ///< 0 = unlimited
    std::chrono::milliseconds time_budget{0};      ///< 0 = unlimited
    std::uint64_t seed = 0;                        ///< 0 = canonical value order
    bool use_screens = true;
    std::size_t cycle_cap = default_cycle_cap;
    unsigned portfolio = 1;                        ///< > 1 runs seeded searches in parallel
    bool restarts = true;                          ///< single search: Luby restarts over derived seeds
};

inline std::uint64_t config_hash(const DecideConfig& c)
{
    const std::string s = std::to_string(c.node_budget) + "|" + std::to_string(c.time_budget.count()) + "|" +
                          std::to_string(c.seed) + "|" + (c.use_screens ? "1" : "0") + "|" +
                          std::to_string(c.cycle_cap) + "|" + std::to_string(c.portfolio) + "|" + (c.restarts ? "1" : "0");
    return fnv1a(s);
}

namespace detail {

class Search {
public:
    enum class Outcome { Found, Exhausted, Stopped };

    /// With `by_sinks`, the search first fixes a topological order from the
    /// back (one sink at a time) and then branches on the remaining edges.
    Search(const DecideConfig& cfg, std::uint64_t seed, const std::atomic<bool>* stop, bool by_sinks = false,
           std::size_t cutoff = 0, std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now())
        : cfg_(cfg), seed_(seed), rng_(seed), stop_(stop), by_sinks_(by_sinks), cutoff_(cutoff), start_(start)
    {
    }

    Outcome run(PartialOrientation root)
    {
        if (!propagate(root)) {
            propagations_ += root.propagations;
            return Outcome::Exhausted;
        }
        if (by_sinks_) {
            VertexSet all(root.graph().vertex_count());
            all.set();
            return dfs_sinks(root, all);
        }
        return dfs(root);
    }

    std::optional<PartialOrientation> solution;
    std::size_t nodes = 0;
    std::size_t propagations_ = 0;
    bool budget_hit = false;
    bool cutoff_hit = false;

private:
    bool out_of_budget()
    {
        if (stop_ && stop_->load(std::memory_order_relaxed))
            return true;
        if (cutoff_ != 0 && nodes >= cutoff_)
            return cutoff_hit = true;
        if (cfg_.node_budget != 0 && nodes >= cfg_.node_budget)
            return budget_hit = true;
        if (cfg_.time_budget.count() != 0 && (nodes & 255) == 0 &&
            std::chrono::steady_clock::now() - start_ >= cfg_.time_budget)
            return budget_hit = true;
        return false;
    }

    std::optional<std::size_t> pick(const PartialOrientation& st) const
    {
        std::optional<std::size_t> best;
        int best_size = 4;
        for (std::size_t e = 0; e < st.graph().edge_count(); ++e) {
            const int size = std::popcount(st.domain(e));
            if (size > 1 && size < best_size) {
                best = e;
                best_size = size;
                if (size == 2)
                    break;
            }
        }
        return best;
    }

    std::vector<std::uint8_t> values(const PartialOrientation& st, std::size_t e)
    {
        const auto& g = st.graph();
        const auto [u, v] = g.edge(e);
        const bool del_first = (g.neighbor_set(u) & g.neighbor_set(v)).count() >= 2;
        std::vector<std::uint8_t> order = del_first
                                              ? std::vector<std::uint8_t>{dom::deleted, dom::forward, dom::backward}
                                              : std::vector<std::uint8_t>{dom::forward, dom::backward, dom::deleted};
        if (seed_ != 0)
            std::shuffle(order.begin(), order.end(), rng_);
        std::erase_if(order, [&](std::uint8_t x) { return !(st.domain(e) & x); });
        return order;
    }

    Outcome dfs(const PartialOrientation& st)
    {
        if (out_of_budget())
            return Outcome::Stopped;
        ++nodes;
        const auto e = pick(st);
        if (!e) {
            solution = st;
            return Outcome::Found;
        }
        for (auto val : values(st, *e)) {
            PartialOrientation child = st;
            child.propagations = 0;
            const bool ok = child.restrict(*e, val) && propagate(child);
            propagations_ += child.propagations;
            if (!ok)
                continue;
            const auto r = dfs(child);
            if (r != Outcome::Exhausted)
                return r;
        }
        return Outcome::Exhausted;
    }

    /// Sink candidates among `left`: vertices none of whose remaining edges is
    /// forced out of them and whose forced parents are pairwise adjacent.
    /// Vertices simplicial in the remaining graph come first, then by degree.
    std::vector<Vertex> sinks(const PartialOrientation& st, const VertexSet& left)
    {
        const auto& g = st.graph();
        struct Key {
            bool simplicial;
            std::size_t degree;
            std::uint64_t tie;
            Vertex v;
        };
        std::vector<Key> keys;
        for (auto i = left.find_first(); i != VertexSet::npos; i = left.find_next(i)) {
            const auto v = static_cast<Vertex>(i);
            const auto nbrs = g.neighbor_set(v) & left;
            VertexSet parents(g.vertex_count());
            bool ok = true;
            for (auto j = nbrs.find_first(); j != VertexSet::npos && ok; j = nbrs.find_next(j)) {
                const auto u = static_cast<Vertex>(j);
                if (!st.allows_arc(u, v) && !st.allows_deletion(u, v))
                    ok = false;
                else if (!st.allows_deletion(u, v))
                    parents.set(j);
            }
            for (auto j = parents.find_first(); j != VertexSet::npos && ok; j = parents.find_next(j))
                ok = (parents - g.neighbor_set(static_cast<Vertex>(j))).count() == 1;
            if (!ok)
                continue;
            bool simplicial = true;
            for (auto j = nbrs.find_first(); j != VertexSet::npos && simplicial; j = nbrs.find_next(j))
                simplicial = (nbrs - g.neighbor_set(static_cast<Vertex>(j))).count() == 1;
            keys.push_back({simplicial, nbrs.count(), seed_ != 0 ? rng_() : 0, v});
        }
        std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
            return std::tie(b.simplicial, a.degree, a.tie, a.v) < std::tie(a.simplicial, b.degree, b.tie, b.v);
        });
        std::vector<Vertex> out;
        for (const auto& k : keys)
            out.push_back(k.v);
        return out;
    }

    Outcome dfs_sinks(const PartialOrientation& st, const VertexSet& left)
    {
        if (left.none())
            return dfs(st);
        if (out_of_budget())
            return Outcome::Stopped;
        ++nodes;
        const auto& g = st.graph();
        for (auto v : sinks(st, left)) {
            PartialOrientation child = st;
            child.propagations = 0;
            bool ok = true;
            const auto nbrs = g.neighbor_set(v) & left;
            for (auto j = nbrs.find_first(); j != VertexSet::npos && ok; j = nbrs.find_next(j)) {
                const auto e = *g.edge_index(v, static_cast<Vertex>(j));
                ok = child.restrict(e, g.edge(e).u == v ? std::uint8_t(dom::all & ~dom::forward)
                                                        : std::uint8_t(dom::all & ~dom::backward));
            }
            ok = ok && propagate(child);
            propagations_ += child.propagations;
            if (!ok)
                continue;
            auto rest = left;
            rest.reset(v);
            const auto r = dfs_sinks(child, rest);
            if (r != Outcome::Exhausted)
                return r;
        }
        return Outcome::Exhausted;
    }

    DecideConfig cfg_;
    std::uint64_t seed_;
    std::mt19937_64 rng_;
    const std::atomic<bool>* stop_;
    bool by_sinks_;
    std::size_t cutoff_;
    std::chrono::steady_clock::time_point start_;
};

inline double elapsed_ms(std::chrono::steady_clock::time_point since)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

inline Decision exhausted_decision(const DecideConfig& cfg, std::size_t nodes)
{
    Decision d;
    d.verdict = Verdict::NotMoral;
    Certificate c;
    c.kind = Certificate::Kind::ExhaustedSearch;
    std::ostringstream token;
    token << "exhausted nodes=" << nodes << " config=" << std::hex << config_hash(cfg);
    c.token = token.str();
    d.certificate = std::move(c);
    return d;
}

/// 1, 1, 2, 1, 1, 2, 4, ... for k = 1, 2, ...
inline std::size_t luby(std::size_t k)
{
    std::size_t size = 1;
    while (size < k)
        size = 2 * size + 1;
    return size == k ? (size + 1) / 2 : luby(k - size / 2);
}

} // namespace detail

/// Completes `seed` to a witness, refutes it, or runs out of budget. With
/// seeded constraints, NotMoral means "no witness extends these constraints".
inline Decision complete(const PartialOrientation& seed, const DecideConfig& cfg = {})
{
    const auto start = std::chrono::steady_clock::now();
    const auto& g = seed.graph();
    Decision out;
    const unsigned workers = std::max(1U, cfg.portfolio);
    if (workers == 1) {
        // Attempt k runs with seed derived from (cfg.seed, k) and a node cutoff
        // of base * luby(k). An attempt that exhausts below its cutoff refutes.
        constexpr std::size_t base = 512;
        std::size_t nodes = 0, props = 0;
        bool budget_hit = false;
        for (std::size_t k = 1;; ++k) {
            std::size_t cutoff = cfg.restarts ? base * detail::luby(k) : 0;
            auto run_cfg = cfg;
            if (cfg.node_budget != 0) {
                run_cfg.node_budget = cfg.node_budget - nodes;
                if (cutoff != 0 && cutoff >= run_cfg.node_budget)
                    cutoff = 0;
            }
            const std::uint64_t s = k == 1 ? cfg.seed : cfg.seed + 0x9E3779B97F4A7C15ULL * (k - 1);
            // Attempts alternate between sink-order and edge branching.
            detail::Search search(run_cfg, s, nullptr, cfg.restarts && k % 2 == 1, cutoff, start);
            const auto r = search.run(seed);
            nodes += search.nodes;
            props += search.propagations_;
            if (r == detail::Search::Outcome::Found) {
                out.verdict = Verdict::Moral;
                out.witness = search.solution->to_dag();
                break;
            }
            if (r == detail::Search::Outcome::Exhausted) {
                out = detail::exhausted_decision(cfg, nodes);
                break;
            }
            if (!search.cutoff_hit || search.budget_hit) {
                budget_hit = search.budget_hit;
                out.verdict = Verdict::Unknown;
                out.reason = "search budget exhausted";
                break;
            }
        }
        out.stats.nodes = nodes;
        out.stats.propagations = props;
        out.stats.budget_hit = budget_hit;
    } else {
        std::atomic<bool> stop{false};
        std::mutex mu;
        std::optional<Decision> winner;
        std::size_t total_nodes = 0, total_props = 0;
        bool any_budget = false;
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    // Worker 0 keeps the configured seed; the others perturb it.
                    const std::uint64_t s = w == 0 ? cfg.seed : cfg.seed + 0x9E3779B97F4A7C15ULL * w;
                    detail::Search search(cfg, s, &stop, w % 2 == 0);
                    const auto r = search.run(seed);
                    std::lock_guard lock(mu);
                    total_nodes += search.nodes;
                    total_props += search.propagations_;
                    any_budget = any_budget || search.budget_hit;
                    if (winner || r == detail::Search::Outcome::Stopped)
                        return;
                    if (r == detail::Search::Outcome::Found) {
                        winner.emplace();
                        winner->verdict = Verdict::Moral;
                        winner->witness = search.solution->to_dag();
                    } else {
                        winner = detail::exhausted_decision(cfg, search.nodes);
                    }
                    stop = true;
                });
            }
        }
        if (winner) {
            out = std::move(*winner);
        } else {
            out.verdict = Verdict::Unknown;
            out.reason = "search budget exhausted";
        }
        out.stats.nodes = total_nodes;
        out.stats.propagations = total_props;
        out.stats.budget_hit = any_budget && out.verdict == Verdict::Unknown;
        out.stats.workers = workers;
        out.stats.deterministic = false;
    }
    if (out.witness && !is_moral_graph_of(g, *out.witness))
        throw ContractViolation("search produced a dag that does not moralize to the input");
    out.stats.settled_by = "search";
    out.stats.elapsed_ms = detail::elapsed_ms(start);
    return out;
}

/// Decides morality of `g`. With unlimited budget the verdict is exact.
inline Decision decide(const UndirectedGraph& g, const DecideConfig& cfg = {})
{
    const auto start = std::chrono::steady_clock::now();
    std::optional<ScreenReport> report;
    if (cfg.use_screens) {
        ScreenOptions opt;
        opt.cycle_cap = cfg.cycle_cap;
        report = screen(g, opt);
        if (report->verdict == ScreenVerdict::NotMoral) {
            Decision d;
            d.verdict = Verdict::NotMoral;
            Certificate c;
            c.kind = Certificate::Kind::NecessaryCondition;
            c.rule = report->fired_rules.front().rule;
            c.cycle = report->fired_rules.front().cycle;
            c.token = std::string(to_string(*c.rule)) + ": " + report->fired_rules.front().evidence;
            d.certificate = std::move(c);
            d.screen_report = std::move(report);
            d.stats.settled_by = "screen";
            d.stats.elapsed_ms = detail::elapsed_ms(start);
            return d;
        }
        if (report->verdict == ScreenVerdict::Moral && report->witness) {
            Decision d;
            d.verdict = Verdict::Moral;
            d.witness = report->witness;
            d.screen_report = std::move(report);
            d.stats.settled_by = "screen";
            d.stats.elapsed_ms = detail::elapsed_ms(start);
            return d;
        }
        // Moral without a constructive witness (web, cycle-exterior): search for one.
    }
    auto d = complete(PartialOrientation(g), cfg);
    d.screen_report = std::move(report);
    d.stats.elapsed_ms = detail::elapsed_ms(start);
    return d;
}

inline constexpr std::size_t default_brute_force_cap = 14;

/// Calls `visit(dag)` for every dag over g's edges (each edge oriented or
/// deleted) whose moral graph is g, in a fixed order; stops when `visit`
/// returns false. Returns the number of candidates examined.
template <typename Visitor>
std::size_t for_each_witness(const UndirectedGraph& g, Visitor&& visit,
                             std::size_t cap = default_brute_force_cap)
{
    const auto m = g.edge_count();
    if (m > cap)
        throw InputError("brute_force: " + std::to_string(m) + " edges exceeds the cap of " +
                         std::to_string(cap));
    // Compact the non-isolated vertices into a 64-bit mask universe.
    std::vector<Vertex> local(g.vertex_count(), 0), global;
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        if (g.degree(v) > 0) {
            local[v] = static_cast<Vertex>(global.size());
            global.push_back(v);
        }
    const auto k = global.size();
    std::vector<std::uint64_t> adj(k, 0);
    std::vector<std::pair<Vertex, Vertex>> ends(m);
    for (std::size_t e = 0; e < m; ++e) {
        const auto a = local[g.edge(e).u], b = local[g.edge(e).v];
        ends[e] = {a, b};
        adj[a] |= std::uint64_t{1} << b;
        adj[b] |= std::uint64_t{1} << a;
    }
    std::vector<int> digit(m, 0); // 0 forward, 1 backward, 2 deleted
    std::vector<std::uint64_t> par(k);
    std::size_t examined = 0;
    while (true) {
        ++examined;
        std::fill(par.begin(), par.end(), 0);
        for (std::size_t e = 0; e < m; ++e) {
            if (digit[e] == 0)
                par[ends[e].second] |= std::uint64_t{1} << ends[e].first;
            else if (digit[e] == 1)
                par[ends[e].first] |= std::uint64_t{1} << ends[e].second;
        }
        bool ok = true;
        // Married parents must be adjacent.
        for (std::size_t c = 0; c < k && ok; ++c)
            for (auto p = par[c]; p != 0 && ok; p &= p - 1) {
                const auto x = std::countr_zero(p);
                if (par[c] & ~(adj[x] | std::uint64_t{1} << x))
                    ok = false;
            }
        // Deleted edges must be married.
        for (std::size_t e = 0; e < m && ok; ++e) {
            if (digit[e] != 2)
                continue;
            const auto both = std::uint64_t{1} << ends[e].first | std::uint64_t{1} << ends[e].second;
            ok = std::any_of(par.begin(), par.end(), [&](std::uint64_t p) { return (p & both) == both; });
        }
        // Acyclic: peel vertices with no remaining parents.
        if (ok) {
            std::uint64_t remaining = k == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
            bool progress = true;
            while (remaining && progress) {
                progress = false;
                for (auto r = remaining; r; r &= r - 1) {
                    const auto x = std::countr_zero(r);
                    if ((par[x] & remaining) == 0) {
                        remaining &= ~(std::uint64_t{1} << x);
                        progress = true;
                    }
                }
            }
            ok = remaining == 0;
        }
        if (ok) {
            std::vector<Arc> arcs;
            for (std::size_t e = 0; e < m; ++e) {
                const auto [u, v] = g.edge(e);
                if (digit[e] == 0)
                    arcs.push_back({u, v});
                else if (digit[e] == 1)
                    arcs.push_back({v, u});
            }
            if (!visit(Dag::build(g.vertex_count(), arcs, g.names())))
                return examined;
        }
        std::size_t i = 0;
        while (i < m && digit[i] == 2)
            digit[i++] = 0;
        if (i == m)
            return examined;
        ++digit[i];
    }
}

/// Exhaustive oracle over all 3^|E| dispositions. Throws InputError above the cap.
inline Decision brute_force(const UndirectedGraph& g, std::size_t cap = default_brute_force_cap)
{
    const auto start = std::chrono::steady_clock::now();
    Decision d;
    const auto examined = for_each_witness(
        g,
        [&](Dag dag) {
            d.witness = std::move(dag);
            return false;
        },
        cap);
    if (d.witness) {
        d.verdict = Verdict::Moral;
    } else {
        d.verdict = Verdict::NotMoral;
        Certificate c;
        c.token = "exhausted " + std::to_string(examined) + " dispositions";
        d.certificate = std::move(c);
    }
    d.stats.nodes = examined;
    d.stats.settled_by = "brute_force";
    d.stats.elapsed_ms = detail::elapsed_ms(start);
    return d;
}

inline void write_decision_text(std::ostream& out, const Decision& d)
{
    out << "verdict: " << to_string(d.verdict) << '\n';
    if (d.screen_report)
        write_report_text(out, *d.screen_report);
    if (d.certificate)
        out << "certificate: " << d.certificate->token << '\n';
    if (!d.reason.empty())
        out << "reason: " << d.reason << '\n';
    out << "settled by: " << d.stats.settled_by << '\n';
    out << "nodes: " << d.stats.nodes << '\n';
    out << "propagations: " << d.stats.propagations << '\n';
    if (!d.stats.deterministic)
        out << "note: portfolio mode with " << d.stats.workers << " workers; result is not deterministic\n";
}

inline void write_decision_keyvalue(std::ostream& out, const Decision& d)
{
    out << "verdict=" << to_string(d.verdict) << '\n';
    if (d.screen_report)
        write_report_keyvalue(out, *d.screen_report);
    if (d.certificate)
        out << "certificate=" << d.certificate->token << '\n';
    if (!d.reason.empty())
        out << "reason=" << d.reason << '\n';
    out << "settled_by=" << d.stats.settled_by << '\n';
    out << "nodes=" << d.stats.nodes << '\n';
    out << "propagations=" << d.stats.propagations << '\n';
    out << "deterministic=" << (d.stats.deterministic ? "true" : "false") << '\n';
    out << "workers=" << d.stats.workers << '\n';
}

} // namespace morality
