#pragma once

// Marked-edge elimination: repeatedly pick an exterior clique C and an extreme
// vertex v, drop every edge touching v and mark the rest of C; when no
// exterior clique is left, drop one marked edge. Removing every edge this way
// proves morality. Getting stuck proves nothing.

#include "graph.hpp"

#include <iterator>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

namespace morality {

enum class Strategy { Greedy, Backtracking };
enum class EliminationStatus { Eliminated, Stuck, BudgetExhausted };

inline std::string_view to_string(Strategy s)
{
    return s == Strategy::Greedy ? "Greedy" : "Backtracking";
}

inline std::string_view to_string(EliminationStatus s)
{
    switch (s) {
    case EliminationStatus::Eliminated: return "Eliminated";
    case EliminationStatus::Stuck: return "Stuck";
    case EliminationStatus::BudgetExhausted: return "BudgetExhausted";
    }
    return "?";
}

struct ExtremeRemoval {
    Clique clique;
    Vertex vertex = 0;
    bool operator==(const ExtremeRemoval&) const = default;
};

struct MarkedEdgeRemoval {
    Edge edge;
    bool operator==(const MarkedEdgeRemoval&) const = default;
};

using EliminationEvent = std::variant<ExtremeRemoval, MarkedEdgeRemoval>;
using Trace = std::vector<EliminationEvent>;

struct EliminationOutcome {
    EliminationStatus status = EliminationStatus::Stuck;
    Trace trace; ///< successful trace, or the deepest one explored when not eliminated
    std::optional<Dag> witness;
    std::size_t expansions = 0;
};

struct EliminateConfig {
    Strategy strategy = Strategy::Greedy;
    std::size_t budget = 1'000'000; ///< choice-point expansions
    std::uint64_t seed = 0;          ///< 0 keeps canonical choice order
};

/// Live subgraph (unmarked and marked edges) plus the marks and the log.
class EliminationState {
public:
    explicit EliminationState(const UndirectedGraph& g)
        : g_(&g), live_(g.edge_count(), true), marked_(g.edge_count(), false),
          live_adj_(g.vertex_count(), VertexSet(g.vertex_count())), edges_left_(g.edge_count())
    {
        for (Vertex v = 0; v < g.vertex_count(); ++v)
            live_adj_[v] = g.neighbor_set(v);
    }

    [[nodiscard]] std::size_t edges_left() const noexcept { return edges_left_; }
    [[nodiscard]] const Trace& trace() const noexcept { return trace_; }
    [[nodiscard]] bool is_live(std::size_t e) const { return live_[e]; }
    [[nodiscard]] bool is_marked(std::size_t e) const { return marked_[e]; }
    [[nodiscard]] const VertexSet& live_neighbors(Vertex v) const { return live_adj_[v]; }

    /// Marked edges still live, in marking order.
    [[nodiscard]] std::vector<Edge> marked_edges() const
    {
        std::vector<Edge> out;
        for (auto e : marked_order_)
            if (live_[e] && marked_[e])
                out.push_back(g_->edge(e));
        return out;
    }

    /// (exterior clique, extreme vertex) pairs of the live graph, ordered by
    /// clique size, then member ids, then vertex id.
    [[nodiscard]] std::vector<ExtremeRemoval> extreme_choices() const
    {
        std::vector<ExtremeRemoval> out;
        for (Vertex v = 0; v < g_->vertex_count(); ++v) {
            const auto& nv = live_adj_[v];
            if (nv.none())
                continue;
            bool simplicial = true;
            for (auto a = nv.find_first(); a != VertexSet::npos && simplicial; a = nv.find_next(a))
                if (!nv.is_subset_of(live_adj_[a] | single(a)))
                    simplicial = false;
            if (!simplicial)
                continue;
            Clique c{detail::members_of(nv)};
            c.members.push_back(v);
            std::sort(c.members.begin(), c.members.end());
            out.push_back({std::move(c), v});
        }
        std::sort(out.begin(), out.end(), [](const ExtremeRemoval& x, const ExtremeRemoval& y) {
            if (x.clique.size() != y.clique.size())
                return x.clique.size() < y.clique.size();
            if (x.clique != y.clique)
                return x.clique < y.clique;
            return x.vertex < y.vertex;
        });
        return out;
    }

    void apply(const ExtremeRemoval& r)
    {
        const Vertex v = r.vertex;
        if (!r.clique.contains(v))
            throw ContractViolation("extreme vertex " + g_->name(v) + " is not in its clique");
        for (Vertex a : r.clique.members)
            for (Vertex b : r.clique.members)
                if (a < b && !live_adj_[a].test(b))
                    throw ContractViolation("event clique is not a clique of the live graph");
        for (auto w = live_adj_[v].find_first(); w != VertexSet::npos; w = live_adj_[v].find_next(w))
            if (!r.clique.contains(static_cast<Vertex>(w)))
                throw ContractViolation(g_->name(v) + " is not extreme in the given clique");
        for (Vertex a : r.clique.members) {
            if (a == v)
                continue;
            drop(*g_->edge_index(a, v));
            for (Vertex b : r.clique.members)
                if (b != v && a < b) {
                    const auto e = *g_->edge_index(a, b);
                    if (!marked_[e]) {
                        marked_[e] = true;
                        marked_order_.push_back(e);
                    }
                }
        }
        trace_.push_back(r);
    }

    void apply(const MarkedEdgeRemoval& r)
    {
        const auto idx = g_->edge_index(r.edge.u, r.edge.v);
        if (!idx || !live_[*idx] || !marked_[*idx])
            throw ContractViolation("edge " + g_->name(r.edge.u) + "-" + g_->name(r.edge.v) +
                                    " is not a live marked edge");
        drop(*idx);
        trace_.push_back(r);
    }

    void apply(const EliminationEvent& ev)
    {
        std::visit([this](const auto& x) { apply(x); }, ev);
    }

    /// Live-edge and mark bits; identifies states up to marking order.
    [[nodiscard]] std::string key() const
    {
        std::string k(live_.size(), '0');
        for (std::size_t e = 0; e < live_.size(); ++e)
            k[e] = static_cast<char>('0' + (live_[e] ? 1 : 0) + (marked_[e] ? 2 : 0));
        return k;
    }

private:
    VertexSet single(std::size_t a) const
    {
        VertexSet s(g_->vertex_count());
        s.set(a);
        return s;
    }

    void drop(std::size_t e)
    {
        if (!live_[e])
            return;
        live_[e] = false;
        --edges_left_;
        const auto& ed = g_->edge(e);
        live_adj_[ed.u].reset(ed.v);
        live_adj_[ed.v].reset(ed.u);
    }

    const UndirectedGraph* g_;
    std::vector<bool> live_;
    std::vector<bool> marked_;
    std::vector<std::size_t> marked_order_;
    std::vector<VertexSet> live_adj_;
    std::size_t edges_left_;
    Trace trace_;
};

/// Replays a complete trace and returns the dag it encodes: every removed
/// extreme vertex becomes a child of the rest of its clique. Throws
/// ContractViolation for an illegal or incomplete trace, or if the result
/// does not moralize to `g`.
inline Dag witness_from_trace(const UndirectedGraph& g, const Trace& trace)
{
    EliminationState state(g);
    std::vector<Arc> arcs;
    for (const auto& ev : trace) {
        state.apply(ev);
        if (const auto* r = std::get_if<ExtremeRemoval>(&ev))
            for (Vertex p : r->clique.members)
                if (p != r->vertex)
                    arcs.push_back({p, r->vertex});
    }
    if (state.edges_left() != 0)
        throw ContractViolation("trace leaves " + std::to_string(state.edges_left()) +
                                " edges uneliminated");
    auto d = Dag::build(g.vertex_count(), arcs, g.names());
    if (!is_moral_graph_of(g, d))
        throw ContractViolation("trace does not yield a dag whose moral graph is the input");
    return d;
}

namespace detail {

class Eliminator {
public:
    Eliminator(const UndirectedGraph& g, const EliminateConfig& cfg) : g_(g), cfg_(cfg), rng_(cfg.seed) {}

    EliminationOutcome run()
    {
        EliminationOutcome out;
        EliminationState root(g_);
        if (cfg_.strategy == Strategy::Greedy)
            greedy(root);
        else
            backtrack(root);
        out.expansions = expansions_;
        if (success_) {
            out.status = EliminationStatus::Eliminated;
            out.trace = success_->trace();
            out.witness = witness_from_trace(g_, out.trace);
        } else {
            out.status = exhausted_ ? EliminationStatus::BudgetExhausted : EliminationStatus::Stuck;
            out.trace = deepest_;
        }
        return out;
    }

private:
    std::vector<EliminationEvent> choices(const EliminationState& s)
    {
        std::vector<EliminationEvent> out;
        for (auto& r : s.extreme_choices())
            out.emplace_back(std::move(r));
        if (out.empty())
            for (const auto& e : s.marked_edges())
                out.emplace_back(MarkedEdgeRemoval{e});
        if (cfg_.seed != 0)
            std::shuffle(out.begin(), out.end(), rng_);
        return out;
    }

    bool expand()
    {
        if (expansions_ >= cfg_.budget) {
            exhausted_ = true;
            return false;
        }
        ++expansions_;
        return true;
    }

    void note(const EliminationState& s)
    {
        if (s.trace().size() >= deepest_.size())
            deepest_ = s.trace();
    }

    void greedy(EliminationState s)
    {
        while (s.edges_left() > 0) {
            if (!expand()) {
                note(s);
                return;
            }
            auto opts = choices(s);
            if (opts.empty()) {
                note(s);
                return;
            }
            s.apply(opts.front());
        }
        success_ = std::move(s);
    }

    bool backtrack(const EliminationState& s)
    {
        if (s.edges_left() == 0) {
            success_ = s;
            return true;
        }
        if (!visited_.insert(s.key()).second)
            return false;
        if (!expand()) {
            note(s);
            return false;
        }
        auto opts = choices(s);
        if (opts.empty())
            note(s);
        for (const auto& ev : opts) {
            EliminationState next = s;
            next.apply(ev);
            if (backtrack(next))
                return true;
            if (exhausted_)
                return false;
        }
        return false;
    }

    const UndirectedGraph& g_;
    EliminateConfig cfg_;
    std::mt19937_64 rng_;
    std::size_t expansions_ = 0;
    bool exhausted_ = false;
    std::optional<EliminationState> success_;
    Trace deepest_;
    std::unordered_set<std::string> visited_;
};

} // namespace detail

inline EliminationOutcome eliminate(const UndirectedGraph& g, const EliminateConfig& cfg = {})
{
    if (cfg.budget == 0)
        throw InputError("eliminate: budget must be positive");
    return detail::Eliminator(g, cfg).run();
}

/// One event per line:
///   extreme <v> in <c1> <c2> ...
///   marked <u> <v>
inline void write_trace(std::ostream& out, const UndirectedGraph& g, const Trace& trace)
{
    for (const auto& ev : trace) {
        if (const auto* r = std::get_if<ExtremeRemoval>(&ev)) {
            out << "extreme " << g.name(r->vertex) << " in";
            for (Vertex c : r->clique.members)
                out << ' ' << g.name(c);
            out << '\n';
        } else {
            const auto& e = std::get<MarkedEdgeRemoval>(ev).edge;
            out << "marked " << g.name(e.u) << ' ' << g.name(e.v) << '\n';
        }
    }
}

inline std::string trace_to_text(const UndirectedGraph& g, const Trace& trace)
{
    std::ostringstream out;
    write_trace(out, g, trace);
    return out.str();
}

inline Trace parse_trace(std::string_view text, const UndirectedGraph& g)
{
    auto lookup = [&](const std::string& tok, std::size_t line_no) -> Vertex {
        if (g.has_names()) {
            if (auto v = g.find(tok))
                return *v;
        } else {
            try {
                std::size_t pos = 0;
                const auto v = std::stoul(tok, &pos);
                if (pos == tok.size() && v < g.vertex_count())
                    return static_cast<Vertex>(v);
            } catch (const std::exception&) {
            }
        }
        throw InputError("trace line " + std::to_string(line_no) + ": unknown vertex '" + tok + "'");
    };
    Trace trace;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::vector<std::string> tok{std::istream_iterator<std::string>(ls), {}};
        if (tok.empty() || tok[0].starts_with("#"))
            continue;
        if (tok[0] == "marked" && tok.size() == 3) {
            trace.emplace_back(MarkedEdgeRemoval{Edge::canonical(lookup(tok[1], line_no), lookup(tok[2], line_no))});
        } else if (tok[0] == "extreme" && tok.size() >= 4 && tok[2] == "in") {
            ExtremeRemoval r;
            r.vertex = lookup(tok[1], line_no);
            for (std::size_t i = 3; i < tok.size(); ++i)
                r.clique.members.push_back(lookup(tok[i], line_no));
            std::sort(r.clique.members.begin(), r.clique.members.end());
            trace.emplace_back(std::move(r));
        } else {
            throw InputError("trace line " + std::to_string(line_no) + ": unrecognized event");
        }
    }
    return trace;
}

} // namespace morality
