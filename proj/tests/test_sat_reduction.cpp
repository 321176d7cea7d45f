#include <morality/sat_reduction.hpp>

#include <gtest/gtest.h>

#include <chrono>

using namespace morality;
using namespace morality::sat;

namespace {

const char* const example_cnf = "c X Y Z\np cnf 3 3\n1 2 3 0\n-1 -2 3 0\n-1 -2 -3 0\n";

CnfFormula example() { return parse_cnf(example_cnf); }

CnfFormula two_clause() { return parse_cnf("p cnf 3 2\n1 2 3 0\n-1 -2 -3 0\n"); }

/// Satisfiable formulas with every variable in both polarities, n <= 5, t <= 8.
std::vector<std::pair<CnfFormula, Assignment>> seeded_satisfiable(std::size_t count)
{
    std::vector<std::pair<CnfFormula, Assignment>> out;
    for (std::uint64_t seed = 1; out.size() < count; ++seed) {
        const auto f = random_formula(3 + seed % 3, 2 + seed % 7, seed);
        const auto p = preprocess(f);
        if (p.settled_satisfiable || p.residual.variables < 3)
            continue;
        if (auto a = solve_brute(p.residual))
            out.emplace_back(p.residual, *a);
    }
    return out;
}

bool all_hold(const MoralityInstance& inst, std::string* failed = nullptr)
{
    for (const auto& r : structural_assertions(inst))
        if (!r.holds) {
            if (failed)
                *failed = r.name;
            return false;
        }
    return true;
}

} // namespace

TEST(ParseCnf, Examples)
{
    auto one = parse_cnf("p cnf 3 1\n1 2 3 0\n");
    EXPECT_EQ(one.variables, 3U);
    ASSERT_EQ(one.clauses.size(), 1U);
    EXPECT_EQ(one.clauses[0], (std::array<int, 3>{1, 2, 3}));

    auto f = example();
    EXPECT_EQ(f.variables, 3U);
    EXPECT_EQ(f.clauses.size(), 3U);
    EXPECT_EQ(f.clauses[1], (std::array<int, 3>{-1, -2, 3}));
    EXPECT_TRUE(f.both_polarities());
    EXPECT_EQ(f.occurrences(-1), (std::vector<std::pair<std::size_t, std::size_t>>{{1, 0}, {2, 0}}));

    // Clauses may span lines.
    EXPECT_EQ(parse_cnf("p cnf 3 1\n1 2\n3 0\n"), one);
}

TEST(ParseCnf, Errors)
{
    EXPECT_THROW(parse_cnf("p cnf 3 1\n1 1 2 0\n"), InputError);
    EXPECT_THROW(parse_cnf("p cnf 3 1\n1 -1 2 0\n"), InputError);
    EXPECT_THROW(parse_cnf("p cnf 3 1\n1 2 0\n"), InputError);
    EXPECT_THROW(parse_cnf("p cnf 3 1\n1 2 3 4 0\n"), InputError);
    EXPECT_THROW(parse_cnf("p cnf 3 1\n1 2 4 0\n"), InputError);
    EXPECT_THROW(parse_cnf("1 2 3 0\n"), InputError);
    EXPECT_THROW(parse_cnf("p cnf 3 2\n1 2 3 0\n"), InputError);
    EXPECT_THROW(parse_cnf("p cnf 3 1\n1 2 3\n"), InputError);
    EXPECT_THROW(parse_cnf("p cnf 3 1\n1 x 3 0\n"), InputError);
    EXPECT_THROW(parse_cnf("p dnf 3 1\n1 2 3 0\n"), InputError);
    EXPECT_THROW(parse_cnf(""), InputError);
}

TEST(ParseCnf, LenientNormalization)
{
    auto dedup = parse_cnf("p cnf 3 1\n1 1 2 0\n", CnfMode::Lenient);
    EXPECT_EQ(dedup.variables, 4U);
    EXPECT_EQ(dedup.clauses, (std::vector<std::array<int, 3>>{{1, 2, 4}, {1, 2, -4}}));
    EXPECT_EQ(dedup.rewrites.size(), 2U);

    auto unit = parse_cnf("p cnf 2 1\n2 0\n", CnfMode::Lenient);
    EXPECT_EQ(unit.variables, 4U);
    EXPECT_EQ(unit.clauses.size(), 4U);
    // Padding keeps the formula equivalent on the original variables.
    for (int bits = 0; bits < 16; ++bits) {
        Assignment a{(bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0, (bits & 8) != 0};
        if (!a[1])
            EXPECT_FALSE(satisfies(unit, a));
    }
    EXPECT_TRUE(satisfies(unit, {false, true, false, false}));

    auto taut = parse_cnf("p cnf 3 2\n1 -1 2 0\n1 2 3 0\n", CnfMode::Lenient);
    EXPECT_EQ(taut.clauses.size(), 1U);
    EXPECT_THROW(parse_cnf("p cnf 3 1\n0\n", CnfMode::Lenient), InputError);
    EXPECT_THROW(parse_cnf("p cnf 3 1\n1 2 3 1 0\n", CnfMode::Lenient), InputError);
    EXPECT_THROW(parse_cnf("p cnf 3 1\n1 2 5 0\n", CnfMode::Lenient), InputError);
}

TEST(ParseCnf, DimacsRoundTrip)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto f = random_formula(6, 10, seed);
        EXPECT_EQ(parse_cnf(to_dimacs(f)), f);
    }
}

TEST(Satisfies, Examples)
{
    auto f = example();
    EXPECT_TRUE(satisfies(f, {true, false, false}));
    EXPECT_FALSE(satisfies(f, {true, true, true}));
    EXPECT_THROW(satisfies(f, {true}), InputError);
    EXPECT_EQ(solve_brute(f), (Assignment{true, false, false}));
}

TEST(Preprocess, Examples)
{
    auto f = example();
    auto same = preprocess(f);
    EXPECT_FALSE(same.settled_satisfiable);
    EXPECT_EQ(same.residual, f);

    auto pure = preprocess(parse_cnf("p cnf 3 1\n1 2 3 0\n"));
    EXPECT_TRUE(pure.settled_satisfiable);
    EXPECT_EQ(pure.partial[0], std::optional<bool>(true));

    // x, y, z, w = 1, 2, 3, 4: y is pure and removes both clauses.
    auto cascade = preprocess(parse_cnf("p cnf 4 2\n1 2 3 0\n-1 2 4 0\n"));
    EXPECT_TRUE(cascade.settled_satisfiable);
    EXPECT_EQ(cascade.partial[1], std::optional<bool>(true));
}

TEST(Preprocess, ResidualKeepsSatisfiabilityAndIsRenumbered)
{
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        const auto f = random_formula(5, 3 + seed % 12, seed);
        const auto p = preprocess(f);
        const bool sat = solve_brute(f).has_value();
        if (p.settled_satisfiable) {
            EXPECT_TRUE(sat) << seed;
            continue;
        }
        ASSERT_TRUE(p.residual.both_polarities()) << seed;
        auto r = solve_brute(p.residual);
        ASSERT_EQ(r.has_value(), sat) << seed;
        if (!r)
            continue;
        // Lift the residual model through the renumbering and the partial assignment.
        Assignment lifted(f.variables);
        for (std::size_t v = 0; v < f.variables; ++v)
            lifted[v] = p.partial[v].value_or(false);
        for (std::size_t i = 0; i < p.original_variable.size(); ++i)
            lifted[p.original_variable[i] - 1] = (*r)[i];
        EXPECT_TRUE(satisfies(f, lifted)) << seed;
    }
}

TEST(Templates, Sizes)
{
    EXPECT_EQ(templates::variable_side.size(), 23U);
    EXPECT_EQ(templates::factor.size(), 30U);
    EXPECT_EQ(templates::auxiliary.size(), 8U);
    EXPECT_EQ(transcription_hash(), fnv1a(templates::serialize()));
    EXPECT_NE(templates::serialize().find(templates::version), std::string::npos);
}

TEST(Reduce, VertexCounts)
{
    EXPECT_EQ(expected_vertex_count(3, 3), 170U);
    auto inst = reduce(example());
    EXPECT_EQ(inst.graph.vertex_count(), 170U);
    EXPECT_EQ(reduce(two_clause()).graph.vertex_count(), 148U);
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto p = preprocess(random_formula(3 + seed % 10, 1 + seed % 30, seed));
        if (p.settled_satisfiable)
            continue;
        const auto r = reduce(p.residual);
        EXPECT_EQ(r.graph.vertex_count(), 32 * r.n() + 22 * r.t() + 8) << seed;
    }
}

TEST(Reduce, EdgeCount)
{
    auto f = example();
    auto inst = reduce(f);
    std::size_t expected = 2 * 23 * 3 + 2 * 3 + 30 * 3 + 8 + (3 - 1) + 2 + 3;
    for (int lit : {1, -1, 2, -2, 3, -3}) {
        const auto k = f.occurrences(lit).size() + 1;
        expected += k * (k - 1) / 2;
    }
    EXPECT_EQ(inst.graph.edge_count(), expected);
}

TEST(Reduce, NamesAndLayout)
{
    auto inst = reduce(example());
    const auto& g = inst.graph;
    EXPECT_EQ(g.name(inst.var(1, true, 15)), "v1_15");
    EXPECT_EQ(g.name(inst.var(1, false, 15)), "nv1_15");
    EXPECT_EQ(g.name(inst.factor(2, 21)), "F2_21");
    EXPECT_EQ(g.name(inst.aux(7)), "S_7");
    EXPECT_EQ(inst.var(2, false, 3), 32U + 16U + 3U);
    EXPECT_EQ(inst.factor(1, 0), 96U);
    EXPECT_EQ(inst.aux(0), 162U);
    EXPECT_EQ(inst.hub(-2), inst.var(2, false, 15));
}

TEST(Reduce, LiteralCliques)
{
    auto inst = reduce(example());
    const auto& g = inst.graph;
    // X-bar occurs as the first term of clauses 2 and 3.
    const std::array<Vertex, 3> xbar{inst.hub(-1), inst.factor(2, 0), inst.factor(3, 0)};
    EXPECT_TRUE(is_clique(g, xbar));
    EXPECT_TRUE(g.adjacent(inst.factor(2, 0), inst.factor(3, 0)));
    // The hub's neighbors outside its own gadget are exactly the occurrence slots.
    std::vector<Vertex> outside;
    for (Vertex w : g.neighbors(inst.hub(-1)))
        if (inst.roles[w].kind != GadgetKind::Variable)
            outside.push_back(w);
    EXPECT_EQ(outside, (std::vector<Vertex>{inst.factor(2, 0), inst.factor(3, 0)}));
    // X occurs once: clique of size 2.
    EXPECT_TRUE(g.adjacent(inst.hub(1), inst.factor(1, 0)));
}

TEST(Reduce, Errors)
{
    EXPECT_THROW(reduce(parse_cnf("p cnf 3 1\n1 2 3 0\n")), InputError);
    CnfFormula repeated;
    repeated.variables = 3;
    repeated.clauses = {{1, 1, 2}, {-1, -2, -3}, {3, 1, 2}};
    EXPECT_THROW(reduce(repeated), InputError);
    EXPECT_THROW(reduce(CnfFormula{}), InputError);
    CnfFormula out_of_range;
    out_of_range.variables = 3;
    out_of_range.clauses = {{1, 2, 4}, {-1, -2, -3}};
    EXPECT_THROW(reduce(out_of_range), InputError);
}

TEST(StructuralAssertions, HoldOnEveryInstance)
{
    std::string failed;
    EXPECT_TRUE(all_hold(reduce(example()), &failed)) << failed;
    EXPECT_TRUE(all_hold(reduce(two_clause()), &failed)) << failed;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto p = preprocess(random_formula(3 + seed % 8, 2 + seed % 20, seed));
        if (p.settled_satisfiable)
            continue;
        EXPECT_TRUE(all_hold(reduce(p.residual), &failed)) << seed << ": " << failed;
    }
}

TEST(StructuralAssertions, DetectTamperedGraphs)
{
    auto inst = reduce(example());
    auto edges = inst.graph.edges();
    edges.erase(std::find(edges.begin(), edges.end(), Edge::canonical(inst.aux(5), inst.aux(6))));
    inst.graph = UndirectedGraph::build(inst.graph.vertex_count(), edges, inst.graph.names());
    EXPECT_FALSE(all_hold(inst));

    auto extra = reduce(example());
    auto more = extra.graph.edges();
    more.push_back(Edge::canonical(extra.factor(1, 0), extra.factor(2, 1)));
    extra.graph = UndirectedGraph::build(extra.graph.vertex_count(), more, extra.graph.names());
    EXPECT_FALSE(all_hold(extra));
}

TEST(ForcedItems, Examples)
{
    auto inst = reduce(example());
    const auto items = forced_items(inst);
    auto has_arc = [&](Vertex a, Vertex b) {
        return std::find(items.arcs.begin(), items.arcs.end(), Arc{a, b}) != items.arcs.end();
    };
    auto has_del = [&](Vertex a, Vertex b) {
        return std::find(items.deletions.begin(), items.deletions.end(), Edge::canonical(a, b)) !=
               items.deletions.end();
    };
    EXPECT_TRUE(has_del(inst.aux(1), inst.aux(2)));
    EXPECT_TRUE(has_arc(inst.aux(1), inst.aux(0)));
    EXPECT_TRUE(has_arc(inst.aux(2), inst.aux(0)));
    EXPECT_TRUE(has_arc(inst.var(1, false, 0), inst.var(2, true, 0)));
    EXPECT_TRUE(has_arc(inst.var(2, false, 0), inst.var(3, true, 0)));
    for (std::size_t c = 1; c <= 3; ++c) {
        EXPECT_TRUE(has_del(inst.factor(c, 6), inst.factor(c, 7)));
        EXPECT_TRUE(has_arc(inst.factor(c, 6), inst.factor(c, 3)));
        EXPECT_TRUE(has_arc(inst.factor(c, 7), inst.factor(c, 3)));
        EXPECT_TRUE(has_arc(inst.aux(7), inst.factor(c, 21)));
    }
    EXPECT_TRUE(has_arc(inst.factor(2, 0), inst.hub(-1)));
    EXPECT_TRUE(has_del(inst.factor(2, 0), inst.factor(3, 0)));
    EXPECT_TRUE(has_arc(inst.var(1, true, 15), inst.var(1, true, 14)));
    // Every forced item names an edge of the graph.
    for (const auto& a : items.arcs)
        EXPECT_TRUE(inst.graph.adjacent(a.from, a.to));
    for (const auto& e : items.deletions)
        EXPECT_TRUE(inst.graph.adjacent(e.u, e.v));
}

TEST(ForcedItems, ConsistentUnderPropagation)
{
    auto st = forced_constraints(reduce(example()));
    EXPECT_FALSE(st.conflict());
    EXPECT_TRUE(propagate(st));
    EXPECT_FALSE(st.conflict());
}

TEST(ForcedItems, AuxiliaryChainFollowsFromPropagation)
{
    auto inst = reduce(example());
    PartialOrientation st(inst.graph);
    // Seed the auxiliary gadget's own forced items and the anchor into S^5.
    st.remove(inst.aux(1), inst.aux(2));
    st.orient(inst.aux(1), inst.aux(0));
    st.orient(inst.aux(2), inst.aux(0));
    st.orient(inst.aux(0), inst.var(1, true, 0));
    st.orient(inst.var(3, false, 0), inst.aux(5));
    ASSERT_TRUE(propagate(st));
    EXPECT_TRUE(st.is_fixed(*inst.graph.edge_index(inst.aux(5), inst.aux(6))));
    EXPECT_TRUE(st.allows_arc(inst.aux(5), inst.aux(6)));
    EXPECT_TRUE(st.is_fixed(*inst.graph.edge_index(inst.aux(6), inst.aux(7))));
    EXPECT_TRUE(st.allows_arc(inst.aux(6), inst.aux(7)));
    for (std::size_t c = 1; c <= 3; ++c) {
        const auto e = *inst.graph.edge_index(inst.aux(7), inst.factor(c, 21));
        EXPECT_TRUE(st.is_fixed(e));
        EXPECT_TRUE(st.allows_arc(inst.aux(7), inst.factor(c, 21)));
    }
}

TEST(Witness, ExampleAssignment)
{
    auto inst = reduce(example());
    const Assignment a{true, false, false};
    auto d = witness_dag(inst, a);
    EXPECT_TRUE(is_acyclic(d).acyclic);
    EXPECT_TRUE(is_moral_graph_of(inst.graph, d));
    EXPECT_TRUE(d.has_arc(inst.var(1, true, 8), inst.var(1, false, 8)));
    EXPECT_TRUE(d.has_arc(inst.var(2, false, 8), inst.var(2, true, 8)));
    EXPECT_EQ(extract_assignment(inst, d), a);
    // Every forced item is present in the witness.
    const auto items = forced_items(inst);
    for (const auto& arc : items.arcs)
        EXPECT_TRUE(d.has_arc(arc.from, arc.to)) << inst.graph.name(arc.from) << "->" << inst.graph.name(arc.to);
    for (const auto& e : items.deletions)
        EXPECT_FALSE(d.has_arc(e.u, e.v) || d.has_arc(e.v, e.u));
}

TEST(Witness, EverySatisfyingAssignmentOfTheExample)
{
    auto f = example();
    auto inst = reduce(f);
    std::size_t satisfying = 0, falsifying = 0;
    for (int bits = 0; bits < 8; ++bits) {
        const Assignment a{(bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0};
        if (satisfies(f, a)) {
            ++satisfying;
            auto d = witness_dag(inst, a);
            EXPECT_TRUE(is_moral_graph_of(inst.graph, d));
            EXPECT_EQ(extract_assignment(inst, d), a);
        } else {
            ++falsifying;
            EXPECT_THROW(witness_dag(inst, a), InputError) << bits;
        }
    }
    // Falsifying: all false (clause 1) and X = Y = true (clauses 2 or 3).
    EXPECT_EQ(falsifying, 3U);
    EXPECT_EQ(satisfying, 5U);
    EXPECT_FALSE(satisfies(f, {true, true, true}));
}

TEST(Witness, TwoClauseInstance)
{
    auto inst = reduce(two_clause());
    const Assignment a{true, false, false};
    ASSERT_TRUE(satisfies(inst.formula, a));
    auto d = witness_dag(inst, a);
    EXPECT_TRUE(is_moral_graph_of(inst.graph, d));
    EXPECT_EQ(extract_assignment(inst, d), a);
}

TEST(Witness, UnconstrainedSearchYieldsASatisfyingAssignment)
{
    auto inst = reduce(two_clause());
    auto d = decide(inst.graph);
    ASSERT_EQ(d.verdict, Verdict::Moral);
    auto a = extract_assignment(inst, *d.witness);
    EXPECT_TRUE(satisfies(inst.formula, a));
}

TEST(Witness, SeededRoundTrips)
{
    for (const auto& [f, a] : seeded_satisfiable(50)) {
        auto inst = reduce(f);
        const auto start = std::chrono::steady_clock::now();
        auto d = witness_dag(inst, a);
        const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        EXPECT_LT(ms, 1000.0);
        ASSERT_TRUE(is_acyclic(d).acyclic);
        ASSERT_TRUE(is_moral_graph_of(inst.graph, d));
        EXPECT_EQ(extract_assignment(inst, d), a);
    }
}

TEST(Extract, RejectsNonWitnesses)
{
    auto inst = reduce(example());
    auto d = witness_dag(inst, {true, false, false});
    auto arcs = d.arcs();
    arcs.pop_back();
    EXPECT_THROW(extract_assignment(inst, Dag::build(inst.graph.vertex_count(), arcs)), InputError);
    EXPECT_THROW(extract_assignment(inst, Dag::build(3, std::vector<Arc>{})), InputError);
}

TEST(Assignment, TextRoundTrip)
{
    const Assignment a{true, false, true};
    EXPECT_EQ(assignment_to_text(a), "v 1 -2 3 0\n");
    EXPECT_EQ(parse_assignment(assignment_to_text(a), 3), a);
    EXPECT_EQ(parse_assignment("s SATISFIABLE\nv -3 1\nv 2 0\n", 3), (Assignment{true, true, false}));
    EXPECT_THROW(parse_assignment("v 1 2 0", 3), InputError);
    EXPECT_THROW(parse_assignment("v 1 2 -3", 3), InputError);
    EXPECT_THROW(parse_assignment("v 1 -1 2 3 0", 3), InputError);
    EXPECT_THROW(parse_assignment("v 1 2 4 0", 3), InputError);
    EXPECT_THROW(parse_assignment("v 1 two 3 0", 3), InputError);
}

TEST(Roles, RoundTrip)
{
    for (const auto& f : {example(), two_clause()}) {
        auto inst = reduce(f);
        auto back = instance_from(inst.graph, roles_to_text(inst));
        EXPECT_EQ(back.formula, inst.formula);
        EXPECT_EQ(back.roles, inst.roles);
        EXPECT_TRUE(back.graph.same_edges(inst.graph));
    }
    auto inst = reduce(example());
    EXPECT_EQ(roles_to_text(inst).substr(0, 19), "role 0 var 1 0 1\nro");
}

TEST(Roles, Errors)
{
    auto inst = reduce(example());
    auto text = roles_to_text(inst);
    EXPECT_THROW(instance_from(inst.graph, text.substr(0, text.size() / 2)), InputError);
    auto bad_kind = text;
    bad_kind.replace(bad_kind.find("var"), 3, "zzz");
    EXPECT_THROW(instance_from(inst.graph, bad_kind), InputError);
    auto other = reduce(two_clause());
    EXPECT_THROW(instance_from(other.graph, text), InputError);
    EXPECT_THROW(instance_from(inst.graph, "role x\n"), InputError);
}

TEST(Reduce, LargeInstanceSmoke)
{
    auto f = random_formula(50, 200, 11);
    auto p = preprocess(f);
    ASSERT_FALSE(p.settled_satisfiable);
    auto inst = reduce(p.residual);
    EXPECT_EQ(inst.graph.vertex_count(), expected_vertex_count(inst.n(), inst.t()));
    std::string failed;
    EXPECT_TRUE(all_hold(inst, &failed)) << failed;
    auto st = forced_constraints(inst);
    EXPECT_TRUE(propagate(st));
}
