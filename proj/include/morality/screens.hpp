#pragma once

// Fast, incomplete morality screens: three sufficient conditions (chordal,
// every chordless cycle touches an exterior clique, web) and two necessary
// ones (every chordless cycle has an edge in a triangle, an exterior clique
// exists), combined cheapest-first into a ScreenReport.

#include "graph.hpp"

#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace morality {

enum class ScreenVerdict { Moral, NotMoral, Inconclusive };

enum class RuleId { MoralChordal, MoralCycleExterior, MoralWeb, NotMoralCycleTriangle, NotMoralNoExterior };

inline std::string_view to_string(ScreenVerdict v)
{
    switch (v) {
    case ScreenVerdict::Moral: return "Moral";
    case ScreenVerdict::NotMoral: return "NotMoral";
    case ScreenVerdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

inline std::string_view to_string(RuleId r)
{
    switch (r) {
    case RuleId::MoralChordal: return "MORAL.CHORDAL";
    case RuleId::MoralCycleExterior: return "MORAL.CYCLE_EXT";
    case RuleId::MoralWeb: return "MORAL.WEB";
    case RuleId::NotMoralCycleTriangle: return "NOTMORAL.CYCLE_TRI";
    case RuleId::NotMoralNoExterior: return "NOTMORAL.NO_EXT";
    }
    return "?";
}

struct FiredRule {
    RuleId rule;
    std::string evidence;
    std::vector<Vertex> cycle;           ///< violating cycle for CYCLE_TRI
    std::vector<Clique> peel_order;      ///< web peeling order for WEB
    std::vector<Vertex> elimination_order; ///< PEO for CHORDAL
};

struct ScreenReport {
    ScreenVerdict verdict = ScreenVerdict::Inconclusive;
    std::vector<FiredRule> fired_rules;
    bool truncated = false;
    std::optional<Dag> witness; ///< constructive witness when one is cheap (chordal, edgeless)
};

struct ScreenOptions {
    std::size_t cycle_cap = default_cycle_cap;
    /// Bound on path extensions per cycle scan; hitting it counts as truncation.
    std::size_t cycle_work_limit = 2'000'000;
};

/// Vertices of `c` whose whole neighborhood lies inside `c`.
inline std::vector<Vertex> extreme_vertices(const UndirectedGraph& g, const Clique& c)
{
    for (Vertex v : c.members)
        if (v >= g.vertex_count())
            throw InputError("clique member " + std::to_string(v) + " out of range");
    if (!is_clique(g, c.members))
        throw InputError("extreme_vertices: member set is not a clique");
    std::vector<Vertex> out;
    for (Vertex v : c.members) {
        const auto& nbrs = g.neighbors(v);
        if (std::all_of(nbrs.begin(), nbrs.end(), [&](Vertex w) { return c.contains(w); }))
            out.push_back(v);
    }
    return out;
}

/// Maximal cliques (of size >= 2) that contain an extreme vertex. A vertex is
/// extreme exactly when its closed neighborhood is a clique, so these are the
/// closed neighborhoods of simplicial non-isolated vertices.
inline std::vector<Clique> exterior_cliques(const UndirectedGraph& g)
{
    std::vector<Clique> out;
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        if (g.degree(v) == 0 || !is_clique(g, g.neighbors(v)))
            continue;
        Clique c{g.neighbors(v)};
        c.members.push_back(v);
        std::sort(c.members.begin(), c.members.end());
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Orients every edge from the later to the earlier vertex of a perfect
/// elimination order; each vertex's parents are then its later neighbors,
/// which form a clique, so no marriage leaves the graph.
inline Dag orient_by_elimination_order(const UndirectedGraph& g, const std::vector<Vertex>& order)
{
    std::vector<std::size_t> pos(g.vertex_count());
    for (std::size_t i = 0; i < order.size(); ++i)
        pos[order[i]] = i;
    std::vector<Arc> arcs;
    arcs.reserve(g.edge_count());
    for (const auto& e : g.edges())
        arcs.push_back(pos[e.u] > pos[e.v] ? Arc{e.u, e.v} : Arc{e.v, e.u});
    return Dag::build(g.vertex_count(), arcs, g.names());
}

struct ChordalCheck {
    bool fired = false;
    std::vector<Vertex> elimination_order;
    std::optional<Dag> witness;
};

inline ChordalCheck check_chordal(const UndirectedGraph& g)
{
    auto res = is_chordal(g);
    if (!res.chordal)
        return {};
    ChordalCheck out;
    out.fired = true;
    out.witness = orient_by_elimination_order(g, res.elimination_order);
    out.elimination_order = std::move(res.elimination_order);
    return out;
}

struct CycleCheck {
    bool fired = false;
    bool truncated = false;
    std::size_t cycles_examined = 0;
    std::vector<Vertex> cycle; ///< violating cycle (CYCLE_TRI) or first non-covered cycle (CYCLE_EXT)
};

/// Sufficient: every chordless cycle (length >= 4) has an edge inside some
/// exterior clique. Never fires when the scan was truncated.
inline CycleCheck check_cycle_exterior(const UndirectedGraph& g, const ScreenOptions& opt = {})
{
    const auto ext = exterior_cliques(g);
    auto in_exterior = [&](Vertex a, Vertex b) {
        return std::any_of(ext.begin(), ext.end(),
                           [&](const Clique& c) { return c.contains(a) && c.contains(b); });
    };
    CycleCheck out;
    bool violated = false;
    auto scan = scan_chordless_cycles(
        g, 4, opt.cycle_cap,
        [&](const std::vector<Vertex>& cyc) {
            ++out.cycles_examined;
            for (std::size_t i = 0; i < cyc.size(); ++i)
                if (in_exterior(cyc[i], cyc[(i + 1) % cyc.size()]))
                    return true;
            violated = true;
            out.cycle = cyc;
            return false;
        },
        opt.cycle_work_limit);
    out.truncated = scan.truncated;
    out.fired = !violated && !scan.truncated;
    return out;
}

/// Necessary: some chordless cycle (length >= 4) with no edge in a triangle
/// refutes morality. The cycle is the certificate.
inline CycleCheck check_cycle_triangle(const UndirectedGraph& g, const ScreenOptions& opt = {})
{
    auto in_triangle = [&](Vertex a, Vertex b) {
        return (g.neighbor_set(a) & g.neighbor_set(b)).any();
    };
    CycleCheck out;
    bool violated = false;
    auto scan = scan_chordless_cycles(
        g, 4, opt.cycle_cap,
        [&](const std::vector<Vertex>& cyc) {
            ++out.cycles_examined;
            for (std::size_t i = 0; i < cyc.size(); ++i)
                if (in_triangle(cyc[i], cyc[(i + 1) % cyc.size()]))
                    return true;
            violated = true;
            out.cycle = cyc;
            return false;
        },
        opt.cycle_work_limit);
    out.truncated = scan.truncated;
    out.fired = violated && !scan.truncated;
    return out;
}

struct WebCheck {
    bool fired = false;
    std::vector<Clique> peel_order; ///< components removed, in order
    std::vector<Clique> residue;    ///< what was left when peeling stalled
};

/// Greedy peeling of the maximal-clique collection: a component is exterior
/// when one of its vertices belongs to no other remaining component. The
/// collection is a web when peeling empties it. Exteriority survives removal
/// of other components, so the peeling order does not change the outcome.
inline WebCheck check_web(const UndirectedGraph& g)
{
    auto remaining = maximal_cliques(g);
    WebCheck out;
    const auto n = g.vertex_count();
    std::vector<std::size_t> membership(n, 0);
    for (const auto& c : remaining)
        for (Vertex v : c.members)
            ++membership[v];
    while (!remaining.empty()) {
        auto it = std::find_if(remaining.begin(), remaining.end(), [&](const Clique& c) {
            return std::any_of(c.members.begin(), c.members.end(),
                               [&](Vertex v) { return membership[v] == 1; });
        });
        if (it == remaining.end()) {
            out.residue = remaining;
            return out;
        }
        for (Vertex v : it->members)
            --membership[v];
        out.peel_order.push_back(std::move(*it));
        remaining.erase(it);
    }
    out.fired = true;
    return out;
}

/// Necessary: a graph with at least one edge is moral only if it has an
/// exterior clique. Returns true when the rule fires (no exterior clique).
inline bool check_has_exterior(const UndirectedGraph& g)
{
    return g.edge_count() > 0 && exterior_cliques(g).empty();
}

namespace detail {

inline std::string join_names(const UndirectedGraph& g, const std::vector<Vertex>& vs)
{
    std::string s;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i)
            s += ' ';
        s += g.name(vs[i]);
    }
    return s;
}

inline std::string clique_names(const UndirectedGraph& g, const Clique& c)
{
    return "{" + join_names(g, c.members) + "}";
}

} // namespace detail

/// Runs the screens in cost order: no-exterior, chordal, cycle-triangle, web,
/// cycle-exterior. The first definitive verdict wins.
inline ScreenReport screen(const UndirectedGraph& g, const ScreenOptions& opt = {})
{
    ScreenReport report;
    if (g.edge_count() == 0) {
        report.verdict = ScreenVerdict::Moral;
        report.witness = Dag::build(g.vertex_count(), std::span<const Arc>{}, g.names());
        return report;
    }
    if (check_has_exterior(g)) {
        report.verdict = ScreenVerdict::NotMoral;
        report.fired_rules.push_back({RuleId::NotMoralNoExterior, "no exterior clique", {}, {}, {}});
        return report;
    }
    if (auto chordal = check_chordal(g); chordal.fired) {
        report.verdict = ScreenVerdict::Moral;
        FiredRule rule{RuleId::MoralChordal,
                       "perfect elimination order " + detail::join_names(g, chordal.elimination_order),
                       {}, {}, chordal.elimination_order};
        report.fired_rules.push_back(std::move(rule));
        report.witness = std::move(chordal.witness);
        return report;
    }
    if (auto tri = check_cycle_triangle(g, opt); tri.fired) {
        report.verdict = ScreenVerdict::NotMoral;
        report.fired_rules.push_back({RuleId::NotMoralCycleTriangle,
                                      "chordless cycle " + detail::join_names(g, tri.cycle) +
                                          " has no edge in a triangle",
                                      tri.cycle, {}, {}});
        return report;
    } else if (tri.truncated) {
        report.truncated = true;
    }
    if (auto web = check_web(g); web.fired) {
        report.verdict = ScreenVerdict::Moral;
        std::string evidence = "peel order";
        for (const auto& c : web.peel_order)
            evidence += " " + detail::clique_names(g, c);
        report.fired_rules.push_back({RuleId::MoralWeb, std::move(evidence), {}, web.peel_order, {}});
        return report;
    }
    if (auto ext = check_cycle_exterior(g, opt); ext.fired) {
        report.verdict = ScreenVerdict::Moral;
        report.fired_rules.push_back({RuleId::MoralCycleExterior,
                                      "all " + std::to_string(ext.cycles_examined) +
                                          " chordless cycles up to length " +
                                          std::to_string(opt.cycle_cap) +
                                          " have an edge in an exterior clique",
                                      {}, {}, {}});
        return report;
    } else if (ext.truncated) {
        report.truncated = true;
    }
    return report;
}

inline void write_report_text(std::ostream& out, const ScreenReport& r)
{
    out << "screen verdict: " << to_string(r.verdict) << '\n';
    for (const auto& f : r.fired_rules)
        out << "fired: " << to_string(f.rule) << " (" << f.evidence << ")\n";
    if (r.truncated)
        out << "note: chordless-cycle enumeration truncated at the cycle cap\n";
}

inline void write_report_keyvalue(std::ostream& out, const ScreenReport& r)
{
    out << "screen.verdict=" << to_string(r.verdict) << '\n';
    out << "screen.rules=";
    for (std::size_t i = 0; i < r.fired_rules.size(); ++i)
        out << (i ? "," : "") << to_string(r.fired_rules[i].rule);
    out << '\n';
    for (std::size_t i = 0; i < r.fired_rules.size(); ++i)
        out << "screen.rule." << i << ".evidence=" << r.fired_rules[i].evidence << '\n';
    out << "screen.truncated=" << (r.truncated ? "true" : "false") << '\n';
}

} // namespace morality
