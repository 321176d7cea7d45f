#pragma once

// 3-SAT to graph morality. A formula with n variables and t clauses becomes a
// graph on 32n + 22t + 8 vertices: two 16-vertex sides per variable, one
// 22-vertex gadget per clause and an 8-vertex auxiliary gadget. The graph is
// moral iff the formula is satisfiable.

#include "decider.hpp"
#include "graph.hpp"

#include <array>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace morality::sat {

// ---------------------------------------------------------------------------
// Formulas

struct CnfFormula {
    std::size_t variables = 0;
    std::vector<std::array<int, 3>> clauses; ///< DIMACS literals, variables 1-based
    std::vector<std::string> rewrites;       ///< lenient-mode normalization log

    /// (clause index, term position) of every occurrence of `literal`.
    [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> occurrences(int literal) const
    {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t c = 0; c < clauses.size(); ++c)
            for (std::size_t k = 0; k < 3; ++k)
                if (clauses[c][k] == literal)
                    out.emplace_back(c, k);
        return out;
    }

    [[nodiscard]] bool both_polarities() const
    {
        std::vector<int> seen(variables + 1, 0);
        for (const auto& cl : clauses)
            for (int l : cl)
                seen[static_cast<std::size_t>(std::abs(l))] |= l > 0 ? 1 : 2;
        return std::all_of(seen.begin() + 1, seen.end(), [](int s) { return s == 3; });
    }

    bool operator==(const CnfFormula& o) const { return variables == o.variables && clauses == o.clauses; }
};

/// Truth value per variable; index 0 is variable 1.
using Assignment = std::vector<bool>;

inline bool satisfies(const CnfFormula& f, const Assignment& a)
{
    if (a.size() != f.variables)
        throw InputError("assignment covers " + std::to_string(a.size()) + " variables, formula has " +
                         std::to_string(f.variables));
    return std::all_of(f.clauses.begin(), f.clauses.end(), [&](const std::array<int, 3>& cl) {
        return std::any_of(cl.begin(), cl.end(), [&](int l) {
            return a[static_cast<std::size_t>(std::abs(l)) - 1] == (l > 0);
        });
    });
}

/// Exhaustive search over all 2^n assignments (n <= 24); first satisfying one
/// in counting order with variable 1 as the low bit.
inline std::optional<Assignment> solve_brute(const CnfFormula& f)
{
    if (f.variables > 24)
        throw InputError("solve_brute: too many variables");
    Assignment a(f.variables);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << f.variables); ++bits) {
        for (std::size_t i = 0; i < f.variables; ++i)
            a[i] = (bits >> i) & 1U;
        if (satisfies(f, a))
            return a;
    }
    return std::nullopt;
}

/// t clauses over three distinct variables each, uniform signs. Requires n >= 3.
inline CnfFormula random_formula(std::size_t n, std::size_t t, std::uint64_t seed)
{
    if (n < 3)
        throw InputError("random_formula: need at least three variables");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> var(1, static_cast<int>(n));
    std::bernoulli_distribution sign(0.5);
    CnfFormula f;
    f.variables = n;
    for (std::size_t c = 0; c < t; ++c) {
        std::array<int, 3> cl{};
        for (std::size_t k = 0; k < 3; ++k) {
            int v = 0;
            do
                v = var(rng);
            while (std::find_if(cl.begin(), cl.begin() + static_cast<std::ptrdiff_t>(k),
                                [&](int l) { return std::abs(l) == v; }) != cl.begin() + static_cast<std::ptrdiff_t>(k));
            cl[k] = sign(rng) ? v : -v;
        }
        f.clauses.push_back(cl);
    }
    return f;
}

enum class CnfMode { Strict, Lenient };

namespace detail {

inline void normalize_clause(std::vector<int> lits, CnfFormula& f, CnfMode mode, std::size_t line_no)
{
    const auto where = "clause ending on line " + std::to_string(line_no);
    if (lits.size() > 3)
        throw InputError(where + " has " + std::to_string(lits.size()) + " literals; only 3-CNF is supported");
    std::vector<int> uniq;
    bool tautology = false;
    for (int l : lits) {
        if (std::find(uniq.begin(), uniq.end(), -l) != uniq.end())
            tautology = true;
        if (std::find(uniq.begin(), uniq.end(), l) == uniq.end())
            uniq.push_back(l);
    }
    if (mode == CnfMode::Strict) {
        if (lits.size() != 3 || uniq.size() != 3 || tautology)
            throw InputError(where + " must have 3 literals over 3 distinct variables");
        f.clauses.push_back({lits[0], lits[1], lits[2]});
        return;
    }
    if (tautology) {
        f.rewrites.push_back(where + ": tautology dropped");
        return;
    }
    if (uniq.empty())
        throw InputError(where + " is empty; the formula is unsatisfiable");
    if (uniq.size() < lits.size())
        f.rewrites.push_back(where + ": repeated literal removed");
    // Pad with fresh variables in both polarities; the padded clauses are
    // jointly equivalent to the original.
    std::vector<std::vector<int>> out{uniq};
    while (out.front().size() < 3) {
        const int y = static_cast<int>(++f.variables);
        std::vector<std::vector<int>> next;
        for (auto c : out) {
            auto pos = c, neg = c;
            pos.push_back(y);
            neg.push_back(-y);
            next.push_back(pos);
            next.push_back(neg);
        }
        out = std::move(next);
        f.rewrites.push_back(where + ": padded with fresh variable " + std::to_string(y));
    }
    for (const auto& c : out)
        f.clauses.push_back({c[0], c[1], c[2]});
}

} // namespace detail

/// Reads DIMACS CNF: `c` comment lines, a `p cnf <n> <t>` header and
/// 0-terminated clauses.
inline CnfFormula parse_cnf(std::string_view text, CnfMode mode = CnfMode::Strict)
{
    CnfFormula f;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    std::size_t declared_clauses = 0, read_clauses = 0, declared_variables = 0;
    std::vector<int> current;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first) || first == "c" || first[0] == 'c' || first == "%")
            continue;
        if (first == "p") {
            std::string fmt;
            long long n = -1, t = -1;
            if (header || !(ls >> fmt >> n >> t) || fmt != "cnf" || n < 0 || t < 0)
                throw InputError("line " + std::to_string(line_no) + ": malformed 'p cnf <n> <t>' header");
            std::string extra;
            if (ls >> extra)
                throw InputError("line " + std::to_string(line_no) + ": trailing tokens in header");
            header = true;
            f.variables = declared_variables = static_cast<std::size_t>(n);
            declared_clauses = static_cast<std::size_t>(t);
            continue;
        }
        if (!header)
            throw InputError("line " + std::to_string(line_no) + ": clause before 'p cnf' header");
        std::istringstream toks(line);
        std::string tok;
        while (toks >> tok) {
            long long lit = 0;
            std::size_t pos = 0;
            try {
                lit = std::stoll(tok, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != tok.size() || tok.empty())
                throw InputError("line " + std::to_string(line_no) + ": bad literal '" + tok + "'");
            if (lit == 0) {
                ++read_clauses;
                detail::normalize_clause(std::move(current), f, mode, line_no);
                current.clear();
                continue;
            }
            if (static_cast<std::size_t>(std::llabs(lit)) > declared_variables)
                throw InputError("line " + std::to_string(line_no) + ": literal " + tok + " out of range");
            current.push_back(static_cast<int>(lit));
        }
    }
    if (!header)
        throw InputError("missing 'p cnf <n> <t>' header");
    if (!current.empty())
        throw InputError("last clause is not terminated by 0");
    if (read_clauses != declared_clauses)
        throw InputError("header declares " + std::to_string(declared_clauses) + " clauses, found " +
                         std::to_string(read_clauses));
    return f;
}

inline std::string to_dimacs(const CnfFormula& f)
{
    std::ostringstream out;
    out << "p cnf " << f.variables << ' ' << f.clauses.size() << '\n';
    for (const auto& cl : f.clauses)
        out << cl[0] << ' ' << cl[1] << ' ' << cl[2] << " 0\n";
    return out.str();
}

struct PreprocessResult {
    bool settled_satisfiable = false;
    CnfFormula residual;                          ///< variables renumbered densely
    std::vector<std::optional<bool>> partial;     ///< per original variable (index 0 = variable 1)
    std::vector<std::size_t> original_variable;   ///< residual variable i+1 -> original id
};

/// Pure-literal elimination to fixpoint. Variables that no longer occur are
/// fixed (pure ones to their satisfying value, absent ones to false) and the
/// residual is renumbered so every remaining variable occurs both ways.
inline PreprocessResult preprocess(const CnfFormula& f)
{
    PreprocessResult r;
    r.partial.assign(f.variables, std::nullopt);
    std::vector<bool> alive(f.clauses.size(), true);
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<int> seen(f.variables + 1, 0);
        for (std::size_t c = 0; c < f.clauses.size(); ++c)
            if (alive[c])
                for (int l : f.clauses[c])
                    seen[static_cast<std::size_t>(std::abs(l))] |= l > 0 ? 1 : 2;
        for (std::size_t v = 1; v <= f.variables; ++v) {
            if (r.partial[v - 1] || (seen[v] != 1 && seen[v] != 2))
                continue;
            const bool value = seen[v] == 1;
            r.partial[v - 1] = value;
            const int lit = value ? static_cast<int>(v) : -static_cast<int>(v);
            for (std::size_t c = 0; c < f.clauses.size(); ++c)
                if (alive[c] && std::find(f.clauses[c].begin(), f.clauses[c].end(), lit) != f.clauses[c].end())
                    alive[c] = false;
            changed = true;
        }
    }
    std::vector<int> renumber(f.variables + 1, 0);
    for (std::size_t c = 0; c < f.clauses.size(); ++c) {
        if (!alive[c])
            continue;
        std::array<int, 3> cl{};
        for (std::size_t k = 0; k < 3; ++k) {
            const auto v = static_cast<std::size_t>(std::abs(f.clauses[c][k]));
            if (renumber[v] == 0) {
                r.original_variable.push_back(v);
                renumber[v] = static_cast<int>(r.original_variable.size());
            }
            cl[k] = f.clauses[c][k] > 0 ? renumber[v] : -renumber[v];
        }
        r.residual.clauses.push_back(cl);
    }
    r.residual.variables = r.original_variable.size();
    for (std::size_t v = 1; v <= f.variables; ++v)
        if (!r.partial[v - 1] && renumber[v] == 0)
            r.partial[v - 1] = false;
    r.settled_satisfiable = r.residual.clauses.empty();
    return r;
}

// ---------------------------------------------------------------------------
// Gadget templates

namespace templates {

inline constexpr std::string_view version = "gadgets-v3";

/// One side (v or v-bar) of a variable gadget, superscripts 0..15.
inline constexpr std::array<std::pair<int, int>, 23> variable_side{{
    {0, 1}, {1, 2}, {0, 2}, {2, 3}, {2, 4}, {3, 4}, {3, 5}, {5, 6}, {6, 4},
    {8, 10}, {8, 13}, {10, 13}, {10, 11}, {11, 14}, {14, 13}, {12, 13}, {12, 5},
    {14, 15}, {9, 10}, {9, 11}, {8, 11}, {8, 14}, {7, 9},
}};

/// Edges joining the two sides of one variable: v^1 - v-bar^1 and v^8 - v-bar^8.
inline constexpr std::array<int, 2> variable_cross{1, 8};

/// Clause gadget, superscripts 0..21. F^0..F^2 are the term slots.
inline constexpr std::array<std::pair<int, int>, 30> factor{{
    {0, 3}, {1, 4}, {2, 5},
    {3, 6}, {3, 7}, {6, 7},
    {4, 8}, {4, 9}, {8, 9},
    {5, 10}, {5, 11}, {10, 11},
    {6, 12}, {12, 13}, {13, 7},
    {8, 14}, {14, 15}, {15, 9},
    {10, 16}, {16, 17}, {17, 11},
    {18, 12}, {19, 14}, {20, 16},
    {18, 19}, {18, 20}, {18, 21}, {19, 20}, {19, 21}, {20, 21},
}};

/// Auxiliary gadget, superscripts 0..7.
inline constexpr std::array<std::pair<int, int>, 8> auxiliary{{
    {1, 2}, {2, 3}, {3, 4}, {4, 1}, {0, 1}, {0, 2}, {5, 6}, {6, 7},
}};

inline std::string serialize()
{
    std::ostringstream out;
    out << version << "\nvar";
    for (auto [a, b] : variable_side)
        out << ' ' << a << '-' << b;
    out << "\ncross";
    for (int j : variable_cross)
        out << ' ' << j;
    out << "\nfactor";
    for (auto [a, b] : factor)
        out << ' ' << a << '-' << b;
    out << "\naux";
    for (auto [a, b] : auxiliary)
        out << ' ' << a << '-' << b;
    out << '\n';
    return out.str();
}

} // namespace templates

/// Fingerprint of the gadget tables, printed by `--version`.
inline std::uint64_t transcription_hash()
{
    return fnv1a(templates::serialize());
}

// ---------------------------------------------------------------------------
// Instances

enum class GadgetKind { Variable, Factor, Auxiliary };

struct Role {
    GadgetKind kind = GadgetKind::Auxiliary;
    std::size_t index = 0;  ///< 1-based variable or clause; 0 for the auxiliary gadget
    int superscript = 0;
    int polarity = 0;       ///< +1 for v, -1 for v-bar, 0 otherwise
    bool operator==(const Role&) const = default;
};

inline std::string_view to_string(GadgetKind k)
{
    switch (k) {
    case GadgetKind::Variable: return "var";
    case GadgetKind::Factor: return "factor";
    case GadgetKind::Auxiliary: return "aux";
    }
    return "?";
}

struct MoralityInstance {
    UndirectedGraph graph;
    std::vector<Role> roles;
    CnfFormula formula;

    [[nodiscard]] std::size_t n() const noexcept { return formula.variables; }
    [[nodiscard]] std::size_t t() const noexcept { return formula.clauses.size(); }

    /// v_i^j (positive) or v-bar_i^j; i is 1-based.
    [[nodiscard]] Vertex var(std::size_t i, bool positive, int j) const
    {
        return static_cast<Vertex>((i - 1) * 32 + (positive ? 0 : 16) + static_cast<std::size_t>(j));
    }
    /// F_c^j; c is 1-based.
    [[nodiscard]] Vertex factor(std::size_t c, int j) const
    {
        return static_cast<Vertex>(32 * n() + (c - 1) * 22 + static_cast<std::size_t>(j));
    }
    [[nodiscard]] Vertex aux(int j) const
    {
        return static_cast<Vertex>(32 * n() + 22 * t() + static_cast<std::size_t>(j));
    }
    /// Literal hub v_i^15 or v-bar_i^15 for a DIMACS literal.
    [[nodiscard]] Vertex hub(int literal) const
    {
        return var(static_cast<std::size_t>(std::abs(literal)), literal > 0, 15);
    }
};

inline std::size_t expected_vertex_count(std::size_t n, std::size_t t)
{
    return 32 * n + 22 * t + 8;
}

inline MoralityInstance reduce(const CnfFormula& f)
{
    if (f.variables == 0 || f.clauses.empty())
        throw InputError("reduce: formula needs at least one variable and one clause");
    for (std::size_t c = 0; c < f.clauses.size(); ++c) {
        const auto& cl = f.clauses[c];
        for (int l : cl)
            if (l == 0 || static_cast<std::size_t>(std::abs(l)) > f.variables)
                throw InputError("reduce: clause " + std::to_string(c + 1) + " has an out-of-range literal");
        if (std::abs(cl[0]) == std::abs(cl[1]) || std::abs(cl[0]) == std::abs(cl[2]) ||
            std::abs(cl[1]) == std::abs(cl[2]))
            throw InputError("reduce: clause " + std::to_string(c + 1) + " repeats a variable");
    }
    if (!f.both_polarities())
        throw InputError("reduce: every variable must occur both positively and negatively (run preprocess)");

    MoralityInstance inst;
    inst.formula = f;
    const auto n = f.variables, t = f.clauses.size();
    const auto total = expected_vertex_count(n, t);
    std::vector<std::string> names(total);
    inst.roles.resize(total);
    for (std::size_t i = 1; i <= n; ++i)
        for (int pol : {1, -1})
            for (int j = 0; j < 16; ++j) {
                const auto v = inst.var(i, pol > 0, j);
                names[v] = (pol > 0 ? "v" : "nv") + std::to_string(i) + "_" + std::to_string(j);
                inst.roles[v] = {GadgetKind::Variable, i, j, pol};
            }
    for (std::size_t c = 1; c <= t; ++c)
        for (int j = 0; j < 22; ++j) {
            const auto v = inst.factor(c, j);
            names[v] = "F" + std::to_string(c) + "_" + std::to_string(j);
            inst.roles[v] = {GadgetKind::Factor, c, j, 0};
        }
    for (int j = 0; j < 8; ++j) {
        names[inst.aux(j)] = "S_" + std::to_string(j);
        inst.roles[inst.aux(j)] = {GadgetKind::Auxiliary, 0, j, 0};
    }

    std::vector<Edge> edges;
    auto add = [&](Vertex a, Vertex b) { edges.push_back(Edge::canonical(a, b)); };
    for (std::size_t i = 1; i <= n; ++i) {
        for (bool pos : {true, false})
            for (auto [a, b] : templates::variable_side)
                add(inst.var(i, pos, a), inst.var(i, pos, b));
        for (int j : templates::variable_cross)
            add(inst.var(i, true, j), inst.var(i, false, j));
    }
    for (std::size_t c = 1; c <= t; ++c)
        for (auto [a, b] : templates::factor)
            add(inst.factor(c, a), inst.factor(c, b));
    for (auto [a, b] : templates::auxiliary)
        add(inst.aux(a), inst.aux(b));
    // Chain through the variable gadgets, anchored at S^0 and S^5.
    for (std::size_t i = 1; i < n; ++i)
        add(inst.var(i, false, 0), inst.var(i + 1, true, 0));
    add(inst.aux(0), inst.var(1, true, 0));
    add(inst.var(n, false, 0), inst.aux(5));
    for (std::size_t c = 1; c <= t; ++c)
        add(inst.aux(7), inst.factor(c, 21));
    // Literal cliques: the hub plus every slot holding that literal.
    for (std::size_t v = 1; v <= n; ++v)
        for (int lit : {static_cast<int>(v), -static_cast<int>(v)}) {
            std::vector<Vertex> members{inst.hub(lit)};
            for (auto [c, k] : f.occurrences(lit))
                members.push_back(inst.factor(c + 1, static_cast<int>(k)));
            for (std::size_t a = 0; a < members.size(); ++a)
                for (std::size_t b = a + 1; b < members.size(); ++b)
                    add(members[a], members[b]);
        }
    inst.graph = UndirectedGraph::build(total, edges, std::move(names));
    return inst;
}

// ---------------------------------------------------------------------------
// Structural checks of the built graph

struct AssertionResult {
    std::string name;
    bool holds = false;
};

/// Evaluates the structural assertions that pin the gadget tables to the
/// forced-constraint arguments, on every gadget of `inst`.
inline std::vector<AssertionResult> structural_assertions(const MoralityInstance& inst)
{
    const auto& g = inst.graph;
    std::vector<AssertionResult> out;
    auto check = [&](std::string name, bool holds) { out.push_back({std::move(name), holds}); };
    auto adj = [&](Vertex a, Vertex b) { return g.adjacent(a, b); };
    auto chordless4 = [&](Vertex a, Vertex b, Vertex c, Vertex d) {
        return adj(a, b) && adj(b, c) && adj(c, d) && adj(d, a) && !adj(a, c) && !adj(b, d);
    };
    const auto n = inst.n(), t = inst.t();

    check("vertex count is 32n + 22t + 8", g.vertex_count() == expected_vertex_count(n, t));
    {
        std::size_t var = 0, fac = 0, aux = 0;
        for (const auto& r : inst.roles)
            (r.kind == GadgetKind::Variable ? var : r.kind == GadgetKind::Factor ? fac : aux)++;
        check("roles partition the vertices", inst.roles.size() == g.vertex_count() && var == 32 * n &&
                                                  fac == 22 * t && aux == 8);
    }
    auto S = [&](int j) { return inst.aux(j); };
    check("S1-S2-S3-S4 is a chordless 4-cycle", chordless4(S(1), S(2), S(3), S(4)));
    check("S0 adjacent to S1 and S2", adj(S(0), S(1)) && adj(S(0), S(2)));
    check("S0 not adjacent to v1^2", !adj(S(0), inst.var(1, true, 2)));
    check("S5 adjacent to S6, not S7", adj(S(5), S(6)) && !adj(S(5), S(7)));
    {
        bool ok = adj(S(6), S(7));
        for (std::size_t c = 1; c <= t; ++c)
            ok = ok && !adj(S(6), inst.factor(c, 21));
        check("S6 adjacent to S7 and to no F^21", ok);
    }
    for (std::size_t i = 1; i <= n; ++i) {
        const auto tag = std::to_string(i);
        for (bool pos : {true, false}) {
            auto V = [&](int j) { return inst.var(i, pos, j); };
            auto W = [&](int j) { return inst.var(i, !pos, j); };
            const std::string side = (pos ? "v" : "nv") + tag;
            check(side + ": 3-5-6-4 is a chordless 4-cycle", chordless4(V(3), V(5), V(6), V(4)));
            check(side + ": 2 adjacent to 3 and 4", adj(V(2), V(3)) && adj(V(2), V(4)));
            check(side + ": triangle 0-1-2", adj(V(0), V(1)) && adj(V(1), V(2)) && adj(V(0), V(2)));
            check(side + ": 1 adjacent to the other side's 1", adj(V(1), W(1)));
            check(side + ": 0 not adjacent to the other side's 1", !adj(V(0), W(1)));
            check(side + ": 8 adjacent to the other side's 8, own 10 and 13",
                  adj(V(8), W(8)) && adj(V(8), V(10)) && adj(V(8), V(13)));
            check(side + ": other side's 8 not adjacent to 10 or 13", !adj(W(8), V(10)) && !adj(W(8), V(13)));
            check(side + ": 10-11-14-13 is a chordless 4-cycle", chordless4(V(10), V(11), V(14), V(13)));
            check(side + ": 15 adjacent to 14", adj(V(15), V(14)));
        }
        // Mirror symmetry of the two sides.
        bool mirror = true;
        for (int a = 0; a < 16; ++a)
            for (int b = 0; b < 16; ++b)
                mirror = mirror && adj(inst.var(i, true, a), inst.var(i, true, b)) ==
                                       adj(inst.var(i, false, a), inst.var(i, false, b));
        check("v" + tag + ": sides are mirror images", mirror);
    }
    for (std::size_t c = 1; c <= t; ++c) {
        auto F = [&](int j) { return inst.factor(c, j); };
        const std::string tag = "F" + std::to_string(c);
        check(tag + ": 6-7, 8-9, 10-11 with common neighbors 3, 4, 5",
              adj(F(6), F(7)) && adj(F(8), F(9)) && adj(F(10), F(11)) && adj(F(3), F(6)) && adj(F(3), F(7)) &&
                  adj(F(4), F(8)) && adj(F(4), F(9)) && adj(F(5), F(10)) && adj(F(5), F(11)));
        check(tag + ": 3-0, 4-1, 5-2", adj(F(3), F(0)) && adj(F(4), F(1)) && adj(F(5), F(2)));
        check(tag + ": 18-21 form a clique", is_clique(g, std::array<Vertex, 4>{F(18), F(19), F(20), F(21)}));
    }
    // Edges between different gadgets are exactly the chain, anchor and literal-clique edges.
    {
        std::size_t expected = (n - 1) + 2 + t + n /* v1-nv1 */ + n /* v8-nv8 */;
        for (std::size_t v = 1; v <= n; ++v)
            for (int lit : {static_cast<int>(v), -static_cast<int>(v)}) {
                const auto k = inst.formula.occurrences(lit).size();
                expected += k; // hub-slot
            }
        std::size_t across = 0;
        for (const auto& e : g.edges()) {
            const auto& ra = inst.roles[e.u];
            const auto& rb = inst.roles[e.v];
            if (ra.kind != rb.kind || ra.index != rb.index || ra.polarity != rb.polarity)
                ++across;
        }
        // Slot-slot edges inside one literal clique join different clauses unless a
        // clause repeats a literal, which reduce() rejects.
        std::size_t slot_pairs = 0;
        for (std::size_t v = 1; v <= n; ++v)
            for (int lit : {static_cast<int>(v), -static_cast<int>(v)}) {
                const auto k = inst.formula.occurrences(lit).size();
                slot_pairs += k * (k - 1) / 2;
            }
        check("inter-gadget edge count matches the construction rules", across == expected + slot_pairs);
        bool cliques = true;
        for (std::size_t v = 1; v <= n; ++v)
            for (int lit : {static_cast<int>(v), -static_cast<int>(v)}) {
                std::vector<Vertex> members{inst.hub(lit)};
                for (auto [c, k] : inst.formula.occurrences(lit))
                    members.push_back(inst.factor(c + 1, static_cast<int>(k)));
                cliques = cliques && is_clique(g, members);
            }
        check("every literal clique is present", cliques);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Forced structure, witnesses, extraction

struct ForcedItems {
    std::vector<Arc> arcs;
    std::vector<Edge> deletions;
};

/// Arcs and deletions present in every witness dag of the instance.
inline ForcedItems forced_items(const MoralityInstance& inst)
{
    ForcedItems f;
    auto arc = [&](Vertex a, Vertex b) { f.arcs.push_back({a, b}); };
    auto del = [&](Vertex a, Vertex b) { f.deletions.push_back(Edge::canonical(a, b)); };
    const auto n = inst.n(), t = inst.t();
    auto S = [&](int j) { return inst.aux(j); };

    del(S(1), S(2));
    arc(S(1), S(0));
    arc(S(2), S(0));
    arc(S(0), inst.var(1, true, 0));
    for (std::size_t i = 1; i <= n; ++i) {
        for (bool pos : {true, false}) {
            auto V = [&](int j) { return inst.var(i, pos, j); };
            del(V(3), V(4));
            arc(V(3), V(2));
            arc(V(4), V(2));
            arc(V(15), V(14));
        }
        auto V = [&](int j) { return inst.var(i, true, j); };
        auto W = [&](int j) { return inst.var(i, false, j); };
        del(V(0), V(2));
        arc(V(0), V(1));
        arc(V(2), V(1));
        arc(V(1), W(1));
        del(W(1), W(2));
        arc(W(1), W(0));
        arc(W(2), W(0));
        if (i < n)
            arc(W(0), inst.var(i + 1, true, 0));
    }
    arc(inst.var(n, false, 0), S(5));
    arc(S(5), S(6));
    arc(S(6), S(7));
    for (std::size_t c = 1; c <= t; ++c) {
        auto F = [&](int j) { return inst.factor(c, j); };
        arc(S(7), F(21));
        for (auto [a, b, child] : {std::array<int, 3>{6, 7, 3}, {8, 9, 4}, {10, 11, 5}}) {
            del(F(a), F(b));
            arc(F(a), F(child));
            arc(F(b), F(child));
        }
        arc(F(3), F(0));
        arc(F(4), F(1));
        arc(F(5), F(2));
    }
    for (std::size_t v = 1; v <= n; ++v)
        for (int lit : {static_cast<int>(v), -static_cast<int>(v)}) {
            const auto occ = inst.formula.occurrences(lit);
            for (auto [c, k] : occ)
                arc(inst.factor(c + 1, static_cast<int>(k)), inst.hub(lit));
            for (std::size_t a = 0; a < occ.size(); ++a)
                for (std::size_t b = a + 1; b < occ.size(); ++b)
                    del(inst.factor(occ[a].first + 1, static_cast<int>(occ[a].second)),
                        inst.factor(occ[b].first + 1, static_cast<int>(occ[b].second)));
        }
    return f;
}

/// A search state over the instance graph with every forced item applied
/// (not yet propagated).
inline PartialOrientation forced_constraints(const MoralityInstance& inst)
{
    PartialOrientation st(inst.graph);
    const auto items = forced_items(inst);
    for (const auto& a : items.arcs)
        st.orient(a.from, a.to);
    for (const auto& e : items.deletions)
        st.remove(e.u, e.v);
    return st;
}

/// Builds a witness dag from a satisfying assignment: forced items, then
/// v^8 -> v-bar^8 exactly for true variables, then F^21 parents the slot of the
/// first true term of each clause; the rest is completed by search.
inline Dag witness_dag(const MoralityInstance& inst, const Assignment& a, const DecideConfig& cfg = {})
{
    if (!satisfies(inst.formula, a))
        throw InputError("witness_dag: assignment does not satisfy the formula");
    auto st = forced_constraints(inst);
    for (std::size_t i = 1; i <= inst.n(); ++i) {
        if (a[i - 1])
            st.orient(inst.var(i, true, 8), inst.var(i, false, 8));
        else
            st.orient(inst.var(i, false, 8), inst.var(i, true, 8));
    }
    for (std::size_t c = 1; c <= inst.t(); ++c) {
        const auto& cl = inst.formula.clauses[c - 1];
        int first = 0;
        while (a[static_cast<std::size_t>(std::abs(cl[first])) - 1] != (cl[first] > 0))
            ++first;
        for (int k = 0; k < 3; ++k) {
            if (k == first)
                st.orient(inst.factor(c, 21), inst.factor(c, 18 + k));
            else
                st.remove(inst.factor(c, 21), inst.factor(c, 18 + k));
        }
    }
    auto d = complete(st, cfg);
    if (d.verdict == Verdict::NotMoral)
        throw ContractViolation("witness_dag: no dag extends the seeded constraints");
    if (d.verdict == Verdict::Unknown)
        throw std::runtime_error("witness_dag: search budget exhausted");
    return std::move(*d.witness);
}

/// Reads the assignment off a witness dag: variable i is true iff v_i^8 -> v-bar_i^8.
inline Assignment extract_assignment(const MoralityInstance& inst, const Dag& d)
{
    if (d.vertex_count() != inst.graph.vertex_count() || !is_acyclic(d).acyclic ||
        !is_moral_graph_of(inst.graph, d))
        throw InputError("extract_assignment: dag is not a witness for the instance");
    Assignment a(inst.n());
    for (std::size_t i = 1; i <= inst.n(); ++i) {
        const auto v = inst.var(i, true, 8), w = inst.var(i, false, 8);
        if (d.has_arc(v, w))
            a[i - 1] = true;
        else if (d.has_arc(w, v))
            a[i - 1] = false;
        else
            throw ContractViolation("extract_assignment: edge v" + std::to_string(i) + "^8 - nv" +
                                    std::to_string(i) + "^8 is missing from the dag");
    }
    if (!satisfies(inst.formula, a))
        throw ContractViolation("extract_assignment: extracted assignment does not satisfy the formula");
    return a;
}

// ---------------------------------------------------------------------------
// Serialization

/// `v 1 -2 3 0`
inline std::string assignment_to_text(const Assignment& a)
{
    std::ostringstream out;
    out << 'v';
    for (std::size_t i = 0; i < a.size(); ++i)
        out << ' ' << (a[i] ? "" : "-") << i + 1;
    out << " 0\n";
    return out.str();
}

inline Assignment parse_assignment(std::string_view text, std::size_t variables)
{
    std::vector<std::optional<bool>> vals(variables);
    std::istringstream in{std::string(text)};
    std::string tok;
    bool terminated = false;
    while (in >> tok) {
        if (tok == "v" || tok == "s" || tok == "SAT" || tok == "SATISFIABLE")
            continue;
        long long lit = 0;
        std::size_t pos = 0;
        try {
            lit = std::stoll(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != tok.size())
            throw InputError("assignment: bad token '" + tok + "'");
        if (lit == 0) {
            terminated = true;
            break;
        }
        const auto v = static_cast<std::size_t>(std::llabs(lit));
        if (v > variables)
            throw InputError("assignment: variable " + std::to_string(v) + " out of range");
        if (vals[v - 1] && *vals[v - 1] != (lit > 0))
            throw InputError("assignment: variable " + std::to_string(v) + " given both values");
        vals[v - 1] = lit > 0;
    }
    if (!terminated)
        throw InputError("assignment: missing terminating 0");
    Assignment a(variables);
    for (std::size_t i = 0; i < variables; ++i) {
        if (!vals[i])
            throw InputError("assignment: variable " + std::to_string(i + 1) + " has no value");
        a[i] = *vals[i];
    }
    return a;
}

/// `role <vertex> <kind> <index> <superscript> <polarity>` per vertex.
inline std::string roles_to_text(const MoralityInstance& inst)
{
    std::ostringstream out;
    for (Vertex v = 0; v < inst.roles.size(); ++v) {
        const auto& r = inst.roles[v];
        out << "role " << v << ' ' << to_string(r.kind) << ' ' << r.index << ' ' << r.superscript << ' '
            << r.polarity << '\n';
    }
    return out.str();
}

/// Rebuilds an instance from its graph and role table. The formula is read
/// off the hub-slot edges and the graph must equal reduce() of it exactly.
inline MoralityInstance instance_from(const UndirectedGraph& g, std::string_view roles_text)
{
    std::vector<std::optional<Role>> roles(g.vertex_count());
    std::istringstream in{std::string(roles_text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string word, kind;
        long long v = 0, index = 0, sup = 0, pol = 0;
        if (!(ls >> word) || word[0] == '#')
            continue;
        if (word != "role" || !(ls >> v >> kind >> index >> sup >> pol) || v < 0 ||
            static_cast<std::size_t>(v) >= g.vertex_count())
            throw InputError("roles line " + std::to_string(line_no) + ": malformed");
        Role r;
        r.kind = kind == "var" ? GadgetKind::Variable : kind == "factor" ? GadgetKind::Factor
                 : kind == "aux" ? GadgetKind::Auxiliary
                                 : throw InputError("roles line " + std::to_string(line_no) + ": unknown kind");
        r.index = static_cast<std::size_t>(index);
        r.superscript = static_cast<int>(sup);
        r.polarity = static_cast<int>(pol);
        roles[static_cast<std::size_t>(v)] = r;
    }
    std::size_t n = 0, t = 0;
    for (std::size_t v = 0; v < roles.size(); ++v) {
        if (!roles[v])
            throw InputError("roles: vertex " + std::to_string(v) + " has no role");
        if (roles[v]->kind == GadgetKind::Variable)
            n = std::max(n, roles[v]->index);
        if (roles[v]->kind == GadgetKind::Factor)
            t = std::max(t, roles[v]->index);
    }
    if (g.vertex_count() != expected_vertex_count(n, t))
        throw InputError("roles: vertex count does not match 32n + 22t + 8");
    MoralityInstance probe;
    probe.formula.variables = n;
    probe.formula.clauses.resize(t);
    CnfFormula f;
    f.variables = n;
    f.clauses.assign(t, {0, 0, 0});
    for (std::size_t c = 1; c <= t; ++c)
        for (int k = 0; k < 3; ++k) {
            const auto slot = probe.factor(c, k);
            for (Vertex w : g.neighbors(slot)) {
                const auto& r = *roles[w];
                if (r.kind == GadgetKind::Variable && r.superscript == 15)
                    f.clauses[c - 1][static_cast<std::size_t>(k)] =
                        r.polarity > 0 ? static_cast<int>(r.index) : -static_cast<int>(r.index);
            }
            if (f.clauses[c - 1][static_cast<std::size_t>(k)] == 0)
                throw InputError("roles: slot F" + std::to_string(c) + "^" + std::to_string(k) + " has no hub");
        }
    auto inst = reduce(f);
    if (!inst.graph.same_edges(g))
        throw InputError("instance graph does not match the construction for its formula");
    for (std::size_t v = 0; v < roles.size(); ++v)
        if (!(*roles[v] == inst.roles[v]))
            throw InputError("roles: vertex " + std::to_string(v) + " role does not match the construction");
    return inst;
}

} // namespace morality::sat
