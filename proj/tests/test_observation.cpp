#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "dsd/observation.hpp"
#include "dsd/rng.hpp"
#include "oracles.hpp"

using namespace dsd;

TEST_CASE("select_observers draws distinct sorted indices") {
    auto obs = select_observers(14000, 250, 9);
    CHECK(obs.size() == 250);
    CHECK(std::is_sorted(obs.begin(), obs.end()));
    CHECK(std::adjacent_find(obs.begin(), obs.end()) == obs.end());
    CHECK(obs.front() >= 0);
    CHECK(obs.back() < 14000);
    CHECK(obs == select_observers(14000, 250, 9));
    CHECK(obs != select_observers(14000, 250, 10));
}

TEST_CASE("select_observers edge cases") {
    CHECK(select_observers(5, 5, 123) == std::vector<int>{0, 1, 2, 3, 4});
    CHECK_THROWS_AS(select_observers(5, 6, 1), std::invalid_argument);
    CHECK_THROWS_AS(select_observers(5, 0, 1), std::invalid_argument);
}

TEST_CASE("assign_labels follows the 0 / 0.5 / 1 coding") {
    PropagationOutcome o;
    o.holds = {TxKind::Pay, TxKind::Pay, TxKind::Pay, TxKind::Attack,
               TxKind::Pay, TxKind::Pay, TxKind::Pay, TxKind::Pay};

    auto a = assign_labels(o, {0, 7});
    CHECK(label_value(a.labels[0]) == 1.0);
    CHECK(label_value(a.labels[7]) == 1.0);
    for (int v : {1, 2, 3, 4, 5, 6}) CHECK(label_value(a.labels[v]) == 0.5);

    a = assign_labels(o, {3});
    CHECK(label_value(a.labels[3]) == 0.0);

    CHECK_THROWS_AS(assign_labels(o, {99}), std::invalid_argument);
}

TEST_CASE("feature example: labeled path a-b-c") {
    Topology t;
    t.node_count = 3;
    t.adjacency = {{1}, {0, 2}, {1}};
    NodeLabelAssignment a;
    a.labels = {NodeLabel::ObserverWithPay, NodeLabel::NonObserver,
                NodeLabel::ObserverWithoutPay};
    a.observers = {0, 2};
    FeatureMatrix f = extract_features(t, a);
    // middle node: one 1.0-neighbor and one 0.0-neighbor, no 2-hop walks
    CHECK(f.at(1, 0) == 1);
    CHECK(f.at(1, 1) == 0);
    CHECK(f.at(1, 2) == 1);
    for (int c = 3; c < kFeatureDim; ++c) CHECK(f.at(1, c) == 0);
    // endpoint a: one 0.5-neighbor, one (0.5, 0.0) walk
    CHECK(f.at(0, 0) == 0);
    CHECK(f.at(0, 1) == 1);
    CHECK(f.at(0, 2) == 0);
    for (int c = 3; c < kFeatureDim; ++c)
        CHECK(f.at(0, c) == (c == 3 + 3 * 1 + 0 ? 1 : 0));
    CHECK(f.data == oracle::features_by_walk_enumeration(t, a).data);
}

TEST_CASE("all-0.5 labels collapse to degree counts") {
    Topology t = generate_ba(60, 3, 5);
    NodeLabelAssignment a;
    a.labels.assign(60, NodeLabel::NonObserver);
    FeatureMatrix f = extract_features(t, a);
    for (int v = 0; v < 60; ++v) {
        std::int64_t two_hop = 0;
        for (int u : t.adjacency[v]) two_hop += t.degree(u) - 1;
        for (int c = 0; c < kFeatureDim; ++c) {
            std::int64_t want = 0;
            if (c == 1) want = t.degree(v);
            if (c == 7) want = two_hop; // (0.5, 0.5) cell
            CHECK(f.at(v, c) == want);
        }
    }
}

TEST_CASE("single edge has no 2-hop walks") {
    Topology t;
    t.node_count = 2;
    t.adjacency = {{1}, {0}};
    NodeLabelAssignment a;
    a.labels = {NodeLabel::ObserverWithPay, NodeLabel::ObserverWithoutPay};
    a.observers = {0, 1};
    FeatureMatrix f = extract_features(t, a);
    CHECK(f.at(0, 0) == 1);
    CHECK(f.at(1, 2) == 1);
    for (int v = 0; v < 2; ++v)
        for (int c = 3; c < kFeatureDim; ++c) CHECK(f.at(v, c) == 0);
}

TEST_CASE("features match the walk-enumeration oracle on random graphs") {
    Rng rng(4040);
    for (int i = 0; i < 50; ++i) {
        const int n = 2 + static_cast<int>(rng.next_below(49));
        Topology t = oracle::random_connected_graph(n, n, rng.next_u64());
        NodeLabelAssignment a = oracle::random_labels(n, rng.next_u64());
        FeatureMatrix fast = extract_features(t, a);
        FeatureMatrix serial = extract_features_serial(t, a);
        FeatureMatrix want = oracle::features_by_walk_enumeration(t, a);
        CHECK(fast.data == want.data);
        CHECK(serial.data == want.data);
    }
}

TEST_CASE("feature row sums equal the degree identities") {
    Rng rng(808);
    Topology t = generate_ba(300, 5, 17);
    NodeLabelAssignment a = oracle::random_labels(300, rng.next_u64());
    FeatureMatrix f = extract_features(t, a);
    for (int v = 0; v < 300; ++v) {
        std::int64_t hop1 = f.at(v, 0) + f.at(v, 1) + f.at(v, 2);
        CHECK(hop1 == t.degree(v));
        std::int64_t hop2 = 0, want = 0;
        for (int c = 3; c < kFeatureDim; ++c) hop2 += f.at(v, c);
        for (int u : t.adjacency[v]) want += t.degree(u) - 1;
        CHECK(hop2 == want);
    }
}

TEST_CASE("features are permutation-equivariant") {
    Rng rng(606);
    const int n = 30;
    Topology t = oracle::random_connected_graph(n, 25, 11);
    NodeLabelAssignment a = oracle::random_labels(n, 12);

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.next_below(i)]);

    Topology tp;
    tp.node_count = n;
    tp.adjacency.assign(n, {});
    for (int v = 0; v < n; ++v)
        for (int u : t.adjacency[v]) tp.adjacency[perm[v]].push_back(perm[u]);
    for (auto& nbrs : tp.adjacency) std::sort(nbrs.begin(), nbrs.end());
    NodeLabelAssignment ap;
    ap.labels.resize(n);
    for (int v = 0; v < n; ++v) ap.labels[perm[v]] = a.labels[v];

    FeatureMatrix f = extract_features(t, a);
    FeatureMatrix fp = extract_features(tp, ap);
    for (int v = 0; v < n; ++v)
        for (int c = 0; c < kFeatureDim; ++c) CHECK(f.at(v, c) == fp.at(perm[v], c));
}
