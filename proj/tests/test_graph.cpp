#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "hjnet/graph.hpp"
#include "support.hpp"

using namespace hjnet;

namespace {

std::set<std::string> names(const OrientedGraph& g, const std::vector<Path>& ps) {
    std::set<std::string> out;
    for (const auto& p : ps) out.insert(format_path(g, p));
    return out;
}

OrientedGraph loop_graph() {
    GraphBuilder b;
    b.add_vertex("x");
    b.add_edge_pair("l", "x", "x");
    return std::move(b).build();
}

OrientedGraph triangle() {
    GraphBuilder b;
    b.add_vertex("x");
    b.add_vertex("y");
    b.add_vertex("z");
    b.add_edge_pair("e1", "x", "y");
    b.add_edge_pair("e2", "y", "z");
    b.add_edge_pair("e3", "z", "x");
    return std::move(b).build();
}

// Simplicity by brute force: no proper sub-path is a cycle, except the
// whole path itself.
bool contains_proper_cycle(const Path& p) {
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t len = 1; i + len <= p.size(); ++len) {
            if (i == 0 && len == p.size()) continue;
            if (p.subpath(i, len).is_cycle()) return true;
        }
    return false;
}

// Every concatenated edge sequence of length <= max_len.
std::vector<Path> all_paths(const OrientedGraph& g, std::size_t max_len) {
    std::vector<Path> out;
    std::vector<std::vector<EdgeId>> frontier;
    for (EdgeId e = 0; e < g.edge_count(); ++e) frontier.push_back({e});
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<std::vector<EdgeId>> next;
        for (auto& seq : frontier) {
            out.push_back(Path::from_edges(g, seq));
            for (EdgeId e : g.out_edges(g.terminal(seq.back()))) {
                auto s = seq;
                s.push_back(e);
                next.push_back(std::move(s));
            }
        }
        frontier = std::move(next);
    }
    return out;
}

}  // namespace

TEST(Graph, InvolutionIsFixedPointFree) {
    auto g = triangle();
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        EXPECT_NE(opposite(e), e);
        EXPECT_EQ(opposite(opposite(e)), e);
        EXPECT_EQ(g.terminal(e), g.origin(opposite(e)));
    }
    auto l = loop_graph();
    EXPECT_EQ(l.edge_count(), 2u);
    EXPECT_TRUE(l.is_loop(0));
    EXPECT_NE(l.edge_name(0), l.edge_name(1));
}

TEST(Graph, BuilderRejectsInvalidInput) {
    GraphBuilder b;
    b.add_vertex("x");
    EXPECT_THROW(b.add_vertex("x"), Error);
    EXPECT_THROW(b.add_edge_pair("e", "x", "nowhere"), Error);
    EXPECT_THROW(b.add_edge_pair("-e", "x", "x"), Error);
    GraphBuilder lonely;
    lonely.add_vertex("x");
    lonely.add_vertex("y");
    lonely.add_edge_pair("l", "x", "x");
    try {
        std::move(lonely).build();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::graph_invalid);
    }
    GraphBuilder split;
    split.add_vertex("x");
    split.add_vertex("y");
    split.add_edge_pair("l", "x", "x");
    split.add_edge_pair("m", "y", "y");
    EXPECT_THROW(std::move(split).build(), Error);
}

TEST(Graph, SimplePathsOfSingleEdge) {
    auto g = hjtest::two_vertex_graph();
    EXPECT_EQ(names(g, enumerate_simple_paths(g, *g.find_vertex("y"))), (std::set<std::string>{"e", "-e,e"}));
    EXPECT_EQ(names(g, enumerate_simple_paths(g, *g.find_vertex("x"))), (std::set<std::string>{"-e", "e,-e"}));
}

TEST(Graph, SimplePathsOfLoop) {
    auto g = loop_graph();
    EXPECT_EQ(names(g, enumerate_simple_paths(g, 0)), (std::set<std::string>{"l", "-l"}));
    auto twice = Path::from_edges(g, {0, 0});
    EXPECT_FALSE(twice.is_simple());
}

TEST(Graph, CircuitsOfBridgeAndLoop) {
    auto g = hjtest::two_vertex_graph();
    EXPECT_EQ(names(g, enumerate_circuits(g, 0)), (std::set<std::string>{"e,-e"}));
    auto l = loop_graph();
    EXPECT_EQ(names(l, enumerate_circuits(l, 0)), (std::set<std::string>{"l", "-l"}));
}

TEST(Graph, CircuitsOfTriangle) {
    auto g = triangle();
    auto cs = enumerate_circuits(g, *g.find_vertex("x"));
    EXPECT_EQ(names(g, cs), (std::set<std::string>{"e1,e2,e3", "-e3,-e2,-e1", "e1,-e1", "-e3,e3"}));
    EXPECT_TRUE(std::is_sorted(cs.begin(), cs.end()));
}

TEST(Graph, Concat) {
    auto g = triangle();
    auto e1 = parse_path(g, "e1");
    auto p = concat(e1, parse_path(g, "-e1"));
    EXPECT_EQ(format_path(g, p), "e1,-e1");
    EXPECT_EQ(format_path(g, concat(e1, parse_path(g, "e2,e3"))), "e1,e2,e3");
    try {
        concat(e1, parse_path(g, "e3"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::concat_mismatch);
    }
    EXPECT_THROW(parse_path(g, "e1,e3"), Error);
}

TEST(Graph, EnumerationCap) {
    auto g = triangle();
    try {
        enumerate_simple_paths(g, 0, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::enumeration_cap_exceeded);
    }
}

TEST(GraphProperty, RandomGraphs) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        auto g = hjtest::random_graph(rng, 6, 8);
        std::set<std::string> expected_simple;
        std::set<std::string> seen_circuits;
        for (const Path& p : all_paths(g, std::min<std::size_t>(g.vertex_count() + 1, 5))) {
            // reversal is a valid path from terminal to origin
            Path r = p.reversed();
            EXPECT_EQ(r.origin(), p.terminal());
            EXPECT_EQ(r.terminal(), p.origin());
            // simple iff no proper sub-path is a cycle
            EXPECT_EQ(p.is_simple(), !contains_proper_cycle(p)) << format_path(g, p);
        }
        for (VertexId x = 0; x < g.vertex_count(); ++x) {
            auto ps = enumerate_simple_paths(g, x);
            std::set<std::string> uniq = names(g, ps);
            EXPECT_EQ(uniq.size(), ps.size());
            for (const auto& p : ps) {
                EXPECT_TRUE(p.is_simple());
                EXPECT_EQ(p.terminal(), x);
                EXPECT_LE(p.size(), g.vertex_count());
            }
            for (const auto& c : enumerate_circuits(g, x)) {
                EXPECT_TRUE(c.is_circuit());
                EXPECT_EQ(c.origin(), x);
            }
        }
        // completeness against brute force on the short paths
        for (const Path& p : all_paths(g, std::min<std::size_t>(g.vertex_count(), 4))) {
            if (!p.is_simple()) continue;
            auto ps = enumerate_simple_paths(g, p.terminal());
            EXPECT_NE(std::find(ps.begin(), ps.end(), p), ps.end()) << format_path(g, p);
        }
    }
}
