#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "dsd/rng.hpp"
#include "dsd/topology.hpp"

using namespace dsd;

TEST_CASE("generate_ba edge count is exactly m*(n-m)") {
    CHECK(generate_ba(14000, 8, 1).edge_count() == 111936);
    CHECK(generate_ba(100, 4, 7).edge_count() == 4 * 96);
}

TEST_CASE("generate_ba with m=1 yields a connected tree") {
    Topology t = generate_ba(5, 1, 42);
    CHECK(t.edge_count() == 4);
    CHECK(is_connected(t));
}

TEST_CASE("generate_ba rejects bad parameters") {
    CHECK_THROWS_AS(generate_ba(3, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_ba(5, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_ba(0, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_ba(2, 5, 1), std::invalid_argument);
}

TEST_CASE("generate_ba output passes validation and the handshake lemma") {
    Rng rng(99);
    for (int i = 0; i < 20; ++i) {
        const int m = 1 + static_cast<int>(rng.next_below(6));
        const int n = m + 2 + static_cast<int>(rng.next_below(300));
        Topology t = generate_ba(n, m, rng.next_u64());
        CHECK(validate_topology(t).empty());
        std::size_t degree_sum = 0;
        for (int v = 0; v < n; ++v) degree_sum += t.degree(v);
        CHECK(degree_sum == 2 * t.edge_count());
        // non-seed nodes keep their m attachment edges
        for (int v = m; v < n; ++v) CHECK(t.degree(v) >= m);
    }
}

TEST_CASE("generate_ba is deterministic per seed") {
    Topology a = generate_ba(500, 5, 123);
    Topology b = generate_ba(500, 5, 123);
    Topology c = generate_ba(500, 5, 124);
    CHECK(a.adjacency == b.adjacency);
    CHECK(a.adjacency != c.adjacency);
}

TEST_CASE("validate_topology names violated invariants") {
    Topology t;
    t.node_count = 2;
    t.adjacency = {{1}, {0, 1}}; // self-loop at node 1
    auto report = validate_topology(t);
    CHECK(std::find(report.begin(), report.end(), "self-loop") != report.end());

    Topology d;
    d.node_count = 4;
    d.adjacency = {{1}, {0}, {3}, {2}}; // two disjoint edges
    report = validate_topology(d);
    CHECK(std::find(report.begin(), report.end(), "disconnected") != report.end());
}

TEST_CASE("degree_stats on hand-counted graphs") {
    Topology star;
    star.node_count = 5;
    star.adjacency = {{1, 2, 3, 4}, {0}, {0}, {0}, {0}};
    DegreeStats s = degree_stats(star);
    CHECK(s.histogram.at(1) == 4);
    CHECK(s.histogram.at(4) == 1);
    CHECK(s.mean_degree == doctest::Approx(1.6));
    CHECK(s.min_degree == 1);
    CHECK(s.max_degree == 4);

    Topology path;
    path.node_count = 3;
    path.adjacency = {{1}, {0, 2}, {1}};
    s = degree_stats(path);
    CHECK(s.histogram.at(1) == 2);
    CHECK(s.histogram.at(2) == 1);
}

TEST_CASE("degree_stats invariants and power-law slope on a BA graph") {
    Topology t = generate_ba(14000, 8, 3);
    DegreeStats s = degree_stats(t);
    std::size_t total = 0, weighted = 0;
    for (const auto& [deg, count] : s.histogram) {
        total += count;
        weighted += static_cast<std::size_t>(deg) * count;
    }
    CHECK(total == static_cast<std::size_t>(t.node_count));
    CHECK(weighted == 2 * t.edge_count());
    CHECK(s.min_degree == 8);
    CHECK(s.loglog_slope > -4.0);
    CHECK(s.loglog_slope < -2.0);
}

TEST_CASE("topology file round-trips bit-exactly") {
    Topology t = generate_ba(200, 3, 77);
    std::ostringstream first;
    write_topology(first, t);
    std::istringstream in(first.str());
    Topology back = read_topology(in);
    CHECK(back.node_count == t.node_count);
    CHECK(back.ba_m == t.ba_m);
    CHECK(back.seed == t.seed);
    CHECK(back.adjacency == t.adjacency);
    std::ostringstream second;
    write_topology(second, back);
    CHECK(first.str() == second.str());
}

TEST_CASE("read_topology rejects malformed input") {
    std::istringstream empty("");
    CHECK_THROWS(read_topology(empty));
    std::istringstream bad("5 1 0\n0 9\n");
    CHECK_THROWS(read_topology(bad));
}
