// morality: decide graph morality, moralize dags, build and check 3-SAT
// reduction instances, generate test families and run benchmarks.
//
// Exit codes: 0 Moral (or success), 1 NotMoral (or an extracted assignment
// that does not satisfy), 2 Unknown/Inconclusive, 64 usage, 65 bad input
// data (including a cyclic dag), 66 missing input file, 70 internal
// contract violation, 73 output file not writable.

#include <morality/morality.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace morality;

namespace {

namespace exit_code {
constexpr int moral = 0;
constexpr int not_moral = 1;
constexpr int unknown = 2;
constexpr int usage = 64;
constexpr int data = 65;
constexpr int no_input = 66;
constexpr int software = 70;
constexpr int cant_create = 73;
} // namespace exit_code

constexpr std::uint64_t default_seed = gen::default_seed;
constexpr std::size_t default_nodes = 1'000'000;
constexpr std::size_t default_ms = 10'000;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MissingInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OutputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path)
{
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    if (!fs::exists(path))
        throw MissingInput("no such file: " + path);
    return io::read_file(path);
}

void emit(const std::string& path, const std::string& contents)
{
    if (path.empty() || path == "-") {
        std::cout << contents;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << contents))
        throw OutputError("cannot write " + path);
}

std::string dag_text(const Dag& d, const std::string& path)
{
    std::ostringstream out;
    if (fs::path(path).extension() == ".dot")
        io::write_dot(out, d);
    else
        io::write_dag(out, d);
    return out.str();
}

int verdict_exit(Verdict v)
{
    switch (v) {
    case Verdict::Moral: return exit_code::moral;
    case Verdict::NotMoral: return exit_code::not_moral;
    case Verdict::Unknown: return exit_code::unknown;
    }
    return exit_code::unknown;
}

int screen_exit(ScreenVerdict v)
{
    switch (v) {
    case ScreenVerdict::Moral: return exit_code::moral;
    case ScreenVerdict::NotMoral: return exit_code::not_moral;
    case ScreenVerdict::Inconclusive: return exit_code::unknown;
    }
    return exit_code::unknown;
}

Strategy parse_strategy(const std::string& s)
{
    if (s == "greedy")
        return Strategy::Greedy;
    if (s == "backtracking")
        return Strategy::Backtracking;
    throw UsageError("unknown strategy '" + s + "'");
}

// ---------------------------------------------------------------------------

struct CheckOptions {
    std::string input;
    bool screens_only = false;
    std::string witness_path;
    std::string explain_path;
    std::string format = "text";
    std::uint64_t seed = default_seed;
    std::size_t nodes = default_nodes;
    std::size_t ms = default_ms;
    std::size_t cycle_cap = default_cycle_cap;
    unsigned portfolio = 1;
    std::string strategy = "greedy";
    bool no_eliminator = false;
};

int run_check(const CheckOptions& o)
{
    const auto g = io::parse_graph(slurp(o.input));
    const bool kv = o.format == "keyvalue";
    ScreenOptions sopt;
    sopt.cycle_cap = o.cycle_cap;
    auto report = screen(g, sopt);

    if (o.screens_only) {
        if (kv)
            write_report_keyvalue(std::cout, report);
        else
            write_report_text(std::cout, report);
        if (!o.witness_path.empty() && report.witness)
            emit(o.witness_path, dag_text(*report.witness, o.witness_path));
        return screen_exit(report.verdict);
    }

    DecideConfig cfg;
    cfg.node_budget = o.nodes;
    cfg.time_budget = std::chrono::milliseconds(o.ms);
    cfg.seed = o.seed;
    cfg.cycle_cap = o.cycle_cap;
    cfg.portfolio = o.portfolio;

    Decision d;
    std::optional<Trace> trace;
    const bool screen_settled = report.verdict == ScreenVerdict::NotMoral ||
                                (report.verdict == ScreenVerdict::Moral && report.witness);
    if (!screen_settled && !o.no_eliminator) {
        EliminateConfig ecfg;
        ecfg.strategy = parse_strategy(o.strategy);
        ecfg.budget = std::max<std::size_t>(1, o.nodes);
        ecfg.seed = o.seed == default_seed ? 0 : o.seed;
        auto elim = eliminate(g, ecfg);
        if (elim.status == EliminationStatus::Eliminated) {
            d.verdict = Verdict::Moral;
            d.witness = std::move(elim.witness);
            d.screen_report = report;
            d.stats.nodes = elim.expansions;
            d.stats.settled_by = "eliminator";
            trace = std::move(elim.trace);
        }
    }
    if (!trace)
        d = decide(g, cfg);

    if (kv)
        write_decision_keyvalue(std::cout, d);
    else
        write_decision_text(std::cout, d);
    if (!o.witness_path.empty()) {
        if (d.witness)
            emit(o.witness_path, dag_text(*d.witness, o.witness_path));
        else
            std::cerr << "no witness written: verdict is " << to_string(d.verdict) << '\n';
    }
    if (!o.explain_path.empty()) {
        if (trace)
            emit(o.explain_path, trace_to_text(g, *trace));
        else
            std::cerr << "no elimination trace written: settled by " << d.stats.settled_by << '\n';
    }
    return verdict_exit(d.verdict);
}

int run_moralize(const std::string& input, const std::string& output)
{
    const auto d = io::parse_dag(slurp(input));
    if (!is_acyclic(d).acyclic) {
        std::cerr << "error: input dag contains a directed cycle\n";
        return exit_code::data;
    }
    emit(output, io::to_text(moralize(d)));
    return exit_code::moral;
}

sat::CnfFormula read_cnf(const std::string& path, bool lenient)
{
    auto f = sat::parse_cnf(slurp(path), lenient ? sat::CnfMode::Lenient : sat::CnfMode::Strict);
    for (const auto& r : f.rewrites)
        std::cerr << "note: " << r << '\n';
    return f;
}

/// Preprocessed formula plus the variable map back to the input.
struct Prepared {
    sat::PreprocessResult pre;
    bool renumbered = false;
};

Prepared prepare(const sat::CnfFormula& f)
{
    Prepared p{sat::preprocess(f), false};
    p.renumbered = !(p.pre.residual == f);
    if (p.renumbered && !p.pre.settled_satisfiable) {
        std::cerr << "note: pure-literal elimination fixed " << (f.variables - p.pre.residual.variables)
                  << " variables; instance variable i is input variable:";
        for (std::size_t i = 0; i < p.pre.original_variable.size(); ++i)
            std::cerr << ' ' << i + 1 << '=' << p.pre.original_variable[i];
        std::cerr << '\n';
    }
    return p;
}

int run_reduce(const std::string& input, const std::string& output, bool lenient)
{
    const auto f = read_cnf(input, lenient);
    const auto p = prepare(f);
    if (p.pre.settled_satisfiable) {
        std::cout << "formula is satisfiable by pure-literal elimination; no instance written\n";
        sat::Assignment a(f.variables);
        for (std::size_t v = 0; v < f.variables; ++v)
            a[v] = p.pre.partial[v].value_or(false);
        std::cout << sat::assignment_to_text(a);
        return exit_code::moral;
    }
    const auto inst = sat::reduce(p.pre.residual);
    emit(output, io::to_text(inst.graph));
    if (!output.empty() && output != "-")
        emit(output + ".roles", sat::roles_to_text(inst));
    std::cerr << "instance: n=" << inst.n() << " t=" << inst.t() << " vertices=" << inst.graph.vertex_count()
              << " edges=" << inst.graph.edge_count() << '\n';
    return exit_code::moral;
}

int run_witness(const std::string& cnf, const std::string& assignment, const std::string& output, bool lenient,
                std::size_t ms)
{
    const auto f = read_cnf(cnf, lenient);
    const auto a = sat::parse_assignment(slurp(assignment), f.variables);
    if (!sat::satisfies(f, a)) {
        std::cerr << "error: the assignment does not satisfy the formula\n";
        return exit_code::data;
    }
    const auto p = prepare(f);
    if (p.pre.settled_satisfiable) {
        std::cerr << "error: formula is settled by pure-literal elimination; there is no instance\n";
        return exit_code::data;
    }
    const auto inst = sat::reduce(p.pre.residual);
    sat::Assignment local(inst.n());
    for (std::size_t i = 0; i < inst.n(); ++i)
        local[i] = a[p.pre.original_variable[i] - 1];
    DecideConfig cfg;
    cfg.time_budget = std::chrono::milliseconds(ms);
    const auto d = sat::witness_dag(inst, local, cfg);
    if (!is_moral_graph_of(inst.graph, d))
        throw ContractViolation("witness does not moralize to the instance");
    emit(output, dag_text(d, output));
    std::cerr << "witness verified: moralizes to the " << inst.graph.vertex_count() << "-vertex instance\n";
    return exit_code::moral;
}

int run_extract(const std::string& instance, const std::string& roles, const std::string& dag)
{
    const auto g = io::parse_graph(slurp(instance));
    const auto inst = sat::instance_from(g, slurp(roles.empty() ? instance + ".roles" : roles));
    const auto d = io::parse_dag(slurp(dag));
    if (d.vertex_count() != g.vertex_count() || !is_acyclic(d).acyclic || !is_moral_graph_of(g, d)) {
        std::cerr << "error: dag is not a witness for the instance\n";
        return exit_code::data;
    }
    sat::Assignment a(inst.n());
    for (std::size_t i = 1; i <= inst.n(); ++i) {
        const auto v = inst.var(i, true, 8), w = inst.var(i, false, 8);
        if (!d.has_arc(v, w) && !d.has_arc(w, v))
            throw ContractViolation("edge " + g.name(v) + " - " + g.name(w) + " is missing from the witness");
        a[i - 1] = d.has_arc(v, w);
    }
    const bool ok = sat::satisfies(inst.formula, a);
    std::cout << sat::assignment_to_text(a) << "satisfies: " << (ok ? "yes" : "no") << '\n';
    return ok ? exit_code::moral : exit_code::not_moral;
}

int run_gen(const std::string& kind, std::size_t n, double p, std::uint64_t seed, const std::string& output)
{
    if (p < 0.0 || p > 1.0)
        throw UsageError("--p must lie in [0, 1]");
    if (kind == "dag")
        emit(output, io::to_text(gen::random_dag(n, p, seed)));
    else if (kind == "gnp")
        emit(output, io::to_text(gen::gnp(n, p, seed)));
    else if (kind == "chordal")
        emit(output, io::to_text(gen::random_chordal(n, p, seed)));
    else if (kind == "moralized")
        emit(output, io::to_text(gen::random_moralized(n, p, seed)));
    else
        throw UsageError("unknown generator kind '" + kind + "' (dag, gnp, chordal, moralized)");
    return exit_code::moral;
}

// ---------------------------------------------------------------------------
// Benchmarks

double micros_since(std::chrono::steady_clock::time_point t)
{
    return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t).count();
}

struct BenchOptions {
    std::string suite;
    std::string input;
    std::string output;
    std::size_t count = 100;
    std::size_t seeds = 20;
    std::uint64_t seed = default_seed;
};

int bench_screens(const BenchOptions& o, std::ostream& csv)
{
    csv << "family,instance,n,m,screen,eliminator,exact,agree,screen_us,exact_us\n";
    std::size_t rows = 0, decided = 0, wrong = 0;
    auto row = [&](const std::string& family, const std::string& id, const UndirectedGraph& g) {
        auto t0 = std::chrono::steady_clock::now();
        const auto rep = screen(g);
        const double screen_us = micros_since(t0);
        const auto elim = eliminate(g, {.strategy = Strategy::Greedy});
        t0 = std::chrono::steady_clock::now();
        const auto exact = decide(g, {.use_screens = false});
        const double exact_us = micros_since(t0);
        bool agree = true;
        if (rep.verdict != ScreenVerdict::Inconclusive) {
            ++decided;
            agree = (rep.verdict == ScreenVerdict::Moral) == (exact.verdict == Verdict::Moral);
            wrong += !agree;
        }
        ++rows;
        csv << family << ',' << id << ',' << g.vertex_count() << ',' << g.edge_count() << ','
            << to_string(rep.verdict) << ',' << to_string(elim.status) << ',' << to_string(exact.verdict) << ','
            << (agree ? "yes" : "no") << ',' << std::fixed << std::setprecision(1) << screen_us << ',' << exact_us
            << '\n';
    };
    if (!o.input.empty()) {
        row("file", o.input, io::parse_graph(slurp(o.input)));
    } else {
        for (std::uint64_t mask = 0; mask < 1024; ++mask)
            row("exhaustive5", std::to_string(mask), gen::graph_from_mask(5, mask));
        for (std::size_t i = 0; i < o.count; ++i) {
            const auto s = o.seed + i;
            row("gnp", std::to_string(s), gen::gnp(6 + i % 7, 0.3, s));
        }
    }
    std::cout << "suite=screens-vs-exact\nrows=" << rows << "\nscreen_decided=" << decided
              << "\nscreen_errors=" << wrong << "\nprecision=" << std::fixed << std::setprecision(3)
              << (decided ? 1.0 - static_cast<double>(wrong) / static_cast<double>(decided) : 1.0) << '\n';
    return wrong == 0 ? exit_code::moral : exit_code::not_moral;
}

int bench_orderings(const BenchOptions& o, std::ostream& csv)
{
    csv << "family,instance,n,m,strategy,seed,status,events,expansions,us\n";
    std::size_t rows = 0, stuck = 0, eliminated = 0;
    auto run = [&](const std::string& family, const std::string& id, const UndirectedGraph& g) {
        auto one = [&](Strategy s, std::uint64_t seed) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto out = eliminate(g, {.strategy = s, .seed = seed});
            const double us = micros_since(t0);
            ++rows;
            stuck += out.status == EliminationStatus::Stuck;
            eliminated += out.status == EliminationStatus::Eliminated;
            csv << family << ',' << id << ',' << g.vertex_count() << ',' << g.edge_count() << ',' << to_string(s)
                << ',' << seed << ',' << to_string(out.status) << ',' << out.trace.size() << ','
                << out.expansions << ',' << std::fixed << std::setprecision(1) << us << '\n';
        };
        for (std::uint64_t s = 0; s < o.seeds; ++s)
            one(Strategy::Greedy, s);
        one(Strategy::Backtracking, 0);
    };
    if (!o.input.empty()) {
        run("file", o.input, io::parse_graph(slurp(o.input)));
    } else {
        for (std::size_t i = 0; i < o.count; ++i) {
            const auto s = o.seed + i;
            run("moralized", std::to_string(s), gen::random_moralized(8 + i % 13, 0.3, s));
        }
    }
    std::cout << "suite=eliminator-orderings\nrows=" << rows << "\neliminated=" << eliminated << "\nstuck=" << stuck
              << '\n';
    return exit_code::moral;
}

int run_bench(const BenchOptions& o)
{
    if (o.suite.empty())
        throw UsageError("bench needs a suite name (screens-vs-exact, eliminator-orderings)");
    if (o.suite != "screens-vs-exact" && o.suite != "eliminator-orderings")
        throw UsageError("unknown bench suite '" + o.suite + "'");
    std::ostringstream csv;
    const int rc = o.suite == "screens-vs-exact" ? bench_screens(o, csv) : bench_orderings(o, csv);
    if (o.output.empty())
        std::cerr << csv.str();
    else
        emit(o.output, csv.str());
    return rc;
}

std::string version_text()
{
    std::ostringstream out;
    out << "morality 1.0.0\ngadget tables " << sat::templates::version << " hash " << std::hex
        << std::setw(16) << std::setfill('0') << sat::transcription_hash() << '\n';
    return out.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Decide whether an undirected graph is the moral graph of some dag."};
    app.set_version_flag("--version", version_text());
    app.require_subcommand(1);

    CheckOptions chk;
    auto* check = app.add_subcommand("check", "decide morality of a graph file");
    check->add_option("graph", chk.input, "graph file ('-' for stdin)")->required();
    check->add_flag("--screens-only", chk.screens_only, "run the polynomial screens only");
    check->add_option("--witness", chk.witness_path, "write the witness dag (.dot gives DOT)");
    check->add_option("--explain", chk.explain_path, "write the elimination trace when the eliminator settled it");
    check->add_option("--format", chk.format, "report format")->check(CLI::IsMember({"text", "keyvalue"}));
    check->add_option("--seed", chk.seed, "search seed")->capture_default_str();
    check->add_option("--nodes", chk.nodes, "node budget, 0 for none")->capture_default_str();
    check->add_option("--ms", chk.ms, "time budget in milliseconds, 0 for none")->capture_default_str();
    check->add_option("--cycle-cap", chk.cycle_cap, "longest chordless cycle the screens enumerate")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{4}, std::size_t{64}));
    check->add_option("--portfolio", chk.portfolio, "parallel seeded searches")->check(CLI::Range(1U, 64U));
    check->add_option("--strategy", chk.strategy, "eliminator strategy")
        ->check(CLI::IsMember({"greedy", "backtracking"}));
    check->add_flag("--no-eliminator", chk.no_eliminator, "skip the elimination procedure");

    std::string mor_in, mor_out;
    auto* mor = app.add_subcommand("moralize", "write the moral graph of a dag");
    mor->add_option("dag", mor_in, "dag file")->required();
    mor->add_option("-o,--output", mor_out, "output graph file (default stdout)");

    std::string red_in, red_out;
    bool lenient = false;
    auto* red = app.add_subcommand("reduce", "build the morality instance of a 3-CNF formula");
    red->add_option("cnf", red_in, "DIMACS file")->required();
    red->add_option("-o,--output", red_out, "instance graph file; roles go to <output>.roles")->required();
    red->add_flag("--lenient", lenient, "normalize short or repeated-literal clauses");

    std::string wit_cnf, wit_assign, wit_out;
    std::size_t wit_ms = 0;
    auto* wit = app.add_subcommand("witness", "build a verified witness dag from a satisfying assignment");
    wit->add_option("cnf", wit_cnf, "DIMACS file")->required();
    wit->add_option("assignment", wit_assign, "assignment file ('v 1 -2 3 0')")->required();
    wit->add_option("-o,--output", wit_out, "witness dag file (.dot gives DOT)");
    wit->add_option("--ms", wit_ms, "time budget in milliseconds, 0 for none");
    wit->add_flag("--lenient", lenient, "normalize short or repeated-literal clauses");

    std::string ext_inst, ext_dag, ext_roles;
    auto* ext = app.add_subcommand("extract", "read the assignment encoded by a witness dag");
    ext->add_option("instance", ext_inst, "instance graph file")->required();
    ext->add_option("dag", ext_dag, "witness dag file")->required();
    ext->add_option("--roles", ext_roles, "role table (default <instance>.roles)");

    std::string gen_kind, gen_out;
    std::size_t gen_n = 10;
    double gen_p = 0.3;
    std::uint64_t gen_seed = default_seed;
    auto* genc = app.add_subcommand("gen", "generate a seeded test instance");
    genc->add_option("kind", gen_kind, "dag, gnp, chordal or moralized")->required();
    genc->add_option("-n,--n", gen_n, "vertex count")->capture_default_str();
    genc->add_option("-p,--p", gen_p, "edge probability")->capture_default_str();
    genc->add_option("--seed", gen_seed, "seed")->capture_default_str();
    genc->add_option("-o,--output", gen_out, "output file (default stdout)");

    BenchOptions bo;
    auto* bench = app.add_subcommand("bench", "benchmark suites with CSV output");
    bench->add_option("suite", bo.suite, "screens-vs-exact or eliminator-orderings")->required();
    bench->add_option("--input", bo.input, "run on this graph file instead of generated families");
    bench->add_option("-o,--output", bo.output, "CSV file (default stderr)");
    bench->add_option("--count", bo.count, "generated instances")->capture_default_str();
    bench->add_option("--seeds", bo.seeds, "greedy seeds per instance")->capture_default_str();
    bench->add_option("--seed", bo.seed, "first generator seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_code::usage;
    }

    try {
        if (*check)
            return run_check(chk);
        if (*mor)
            return run_moralize(mor_in, mor_out);
        if (*red)
            return run_reduce(red_in, red_out, lenient);
        if (*wit)
            return run_witness(wit_cnf, wit_assign, wit_out, lenient, wit_ms);
        if (*ext)
            return run_extract(ext_inst, ext_roles, ext_dag);
        if (*genc)
            return run_gen(gen_kind, gen_n, gen_p, gen_seed, gen_out);
        if (*bench)
            return run_bench(bo);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_code::usage;
    } catch (const MissingInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code::no_input;
    } catch (const OutputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code::cant_create;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return exit_code::data;
    } catch (const ContractViolation& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return exit_code::software;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code::software;
    }
    return exit_code::usage;
}
