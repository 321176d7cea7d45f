#pragma once

// Text formats.
//
//   graph <n>          dag <n>
//   u v                u -> v
//
// `#` starts a comment. Vertex tokens are integers in [0, n) or, if any token
// in the file is not an integer, names; names get ids in order of first
// appearance. A line holding a single token declares a vertex without an
// edge, which is how writers keep ids and isolated named vertices stable.

#include "graph.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace morality::io {

namespace detail {

inline std::vector<std::string> tokenize(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
            ++i;
        if (i >= line.size())
            break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r')
            ++j;
        out.emplace_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

inline std::optional<std::size_t> parse_index(std::string_view token)
{
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        return std::nullopt;
    return value;
}

struct ParsedLines {
    std::size_t n = 0;
    std::vector<std::vector<std::string>> rows; // declarations (1 token) or pairs (2 tokens)
    std::vector<std::size_t> line_numbers;
};

inline ParsedLines parse_lines(std::istream& in, std::string_view keyword, std::string_view separator)
{
    ParsedLines parsed;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        auto tokens = tokenize(line);
        if (tokens.empty())
            continue;
        if (!have_header) {
            if (tokens.size() != 2 || tokens[0] != keyword)
                throw InputError("line " + std::to_string(line_no) + ": expected header '" +
                                 std::string(keyword) + " <n>'");
            auto n = parse_index(tokens[1]);
            if (!n)
                throw InputError("line " + std::to_string(line_no) + ": bad vertex count '" +
                                 tokens[1] + "'");
            parsed.n = *n;
            have_header = true;
            continue;
        }
        if (!separator.empty() && tokens.size() == 3) {
            if (tokens[1] != separator)
                throw InputError("line " + std::to_string(line_no) + ": expected 'u " +
                                 std::string(separator) + " v'");
            tokens.erase(tokens.begin() + 1);
        } else if (tokens.size() == 2 && !separator.empty()) {
            throw InputError("line " + std::to_string(line_no) + ": expected 'u " +
                             std::string(separator) + " v'");
        }
        if (tokens.size() > 2)
            throw InputError("line " + std::to_string(line_no) + ": too many tokens");
        parsed.rows.push_back(std::move(tokens));
        parsed.line_numbers.push_back(line_no);
    }
    if (!have_header)
        throw InputError("missing '" + std::string(keyword) + " <n>' header");
    return parsed;
}

/// Resolves tokens to ids; returns the name table (empty in integer mode).
inline std::vector<std::string> resolve(const ParsedLines& parsed,
                                        std::vector<std::vector<Vertex>>& resolved)
{
    bool named = false;
    for (const auto& row : parsed.rows)
        for (const auto& t : row)
            if (!parse_index(t))
                named = true;
    std::vector<std::string> names;
    std::unordered_map<std::string, Vertex> ids;
    resolved.clear();
    for (std::size_t r = 0; r < parsed.rows.size(); ++r) {
        std::vector<Vertex> row;
        for (const auto& t : parsed.rows[r]) {
            if (named) {
                auto [it, inserted] = ids.try_emplace(t, static_cast<Vertex>(names.size()));
                if (inserted) {
                    if (names.size() >= parsed.n)
                        throw InputError("line " + std::to_string(parsed.line_numbers[r]) +
                                         ": more distinct names than the declared " +
                                         std::to_string(parsed.n) + " vertices");
                    names.push_back(t);
                }
                row.push_back(it->second);
            } else {
                const auto v = *parse_index(t);
                if (v >= parsed.n)
                    throw InputError("line " + std::to_string(parsed.line_numbers[r]) +
                                     ": vertex " + t + " out of range");
                row.push_back(static_cast<Vertex>(v));
            }
        }
        resolved.push_back(std::move(row));
    }
    if (named) {
        // Unused ids keep generated names so the table stays total.
        for (auto v = names.size(); v < parsed.n; ++v) {
            std::string generated = "_" + std::to_string(v);
            while (ids.count(generated))
                generated.insert(0, "_");
            ids.emplace(generated, static_cast<Vertex>(v));
            names.push_back(generated);
        }
    }
    return names;
}

inline std::string quote_dot(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + "\"";
}

} // namespace detail

inline UndirectedGraph read_graph(std::istream& in)
{
    auto parsed = detail::parse_lines(in, "graph", "");
    std::vector<std::vector<Vertex>> rows;
    auto names = detail::resolve(parsed, rows);
    std::vector<Edge> edges;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != 2)
            continue;
        if (rows[r][0] == rows[r][1])
            throw InputError("line " + std::to_string(parsed.line_numbers[r]) + ": self-loop");
        edges.push_back(Edge::canonical(rows[r][0], rows[r][1]));
    }
    return UndirectedGraph::build(parsed.n, edges, std::move(names));
}

inline Dag read_dag(std::istream& in)
{
    auto parsed = detail::parse_lines(in, "dag", "->");
    std::vector<std::vector<Vertex>> rows;
    auto names = detail::resolve(parsed, rows);
    std::vector<Arc> arcs;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != 2)
            continue;
        if (rows[r][0] == rows[r][1])
            throw InputError("line " + std::to_string(parsed.line_numbers[r]) + ": self-loop");
        arcs.push_back({rows[r][0], rows[r][1]});
    }
    return Dag::build(parsed.n, arcs, std::move(names));
}

inline UndirectedGraph parse_graph(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return read_graph(in);
}

inline Dag parse_dag(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return read_dag(in);
}

inline void write_graph(std::ostream& out, const UndirectedGraph& g)
{
    out << "graph " << g.vertex_count() << '\n';
    if (g.has_names())
        for (Vertex v = 0; v < g.vertex_count(); ++v)
            out << g.name(v) << '\n';
    for (const auto& e : g.edges())
        out << g.name(e.u) << ' ' << g.name(e.v) << '\n';
}

inline void write_dag(std::ostream& out, const Dag& d)
{
    out << "dag " << d.vertex_count() << '\n';
    if (d.has_names())
        for (Vertex v = 0; v < d.vertex_count(); ++v)
            out << d.name(v) << '\n';
    for (const auto& a : d.arcs())
        out << d.name(a.from) << " -> " << d.name(a.to) << '\n';
}

inline void write_dot(std::ostream& out, const UndirectedGraph& g)
{
    out << "graph G {\n";
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        out << "  " << detail::quote_dot(g.name(v)) << ";\n";
    for (const auto& e : g.edges())
        out << "  " << detail::quote_dot(g.name(e.u)) << " -- " << detail::quote_dot(g.name(e.v))
            << ";\n";
    out << "}\n";
}

inline void write_dot(std::ostream& out, const Dag& d)
{
    out << "digraph D {\n";
    for (Vertex v = 0; v < d.vertex_count(); ++v)
        out << "  " << detail::quote_dot(d.name(v)) << ";\n";
    for (const auto& a : d.arcs())
        out << "  " << detail::quote_dot(d.name(a.from)) << " -> " << detail::quote_dot(d.name(a.to))
            << ";\n";
    out << "}\n";
}

template <typename T>
std::string to_text(const T& value)
{
    std::ostringstream out;
    if constexpr (std::is_same_v<T, UndirectedGraph>)
        write_graph(out, value);
    else
        write_dag(out, value);
    return out.str();
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, std::string_view contents)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write '" + path + "'");
    out << contents;
}

} // namespace morality::io
