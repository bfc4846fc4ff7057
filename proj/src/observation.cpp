#include "dsd/observation.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dsd/rng.hpp"

namespace dsd {

std::vector<int> select_observers(int n, int k, std::uint64_t seed) {
    if (k < 1 || k > n)
        throw std::invalid_argument("select_observers: require 1 <= k <= n");
    Rng rng(derive_seed(seed, 0x4444));
    std::vector<int> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    // partial Fisher-Yates: first k entries are a uniform k-subset
    for (int i = 0; i < k; ++i) {
        int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

NodeLabelAssignment assign_labels(const PropagationOutcome& o,
                                  const std::vector<int>& observers) {
    const int n = static_cast<int>(o.holds.size());
    NodeLabelAssignment a;
    a.labels.assign(n, NodeLabel::NonObserver);
    a.observers = observers;
    for (int v : observers) {
        if (v < 0 || v >= n)
            throw std::invalid_argument("assign_labels: observer index out of range");
        a.labels[v] = o.holds[v] == TxKind::Pay ? NodeLabel::ObserverWithPay
                                                : NodeLabel::ObserverWithoutPay;
    }
    return a;
}

namespace {

// 2-hop pair counts via per-neighbor class totals: walks (v,u,w) with w != v
// are N(u)'s class counts minus one for the backtrack to v.
void feature_row(const Topology& t, const NodeLabelAssignment& a,
                 const std::vector<std::array<std::int64_t, 3>>& nbr_class_counts,
                 int v, FeatureMatrix& f) {
    const int cv = static_cast<int>(a.labels[v]);
    for (int u : t.adjacency[v]) {
        const int cu = static_cast<int>(a.labels[u]);
        f.at(v, cu) += 1;
        for (int j = 0; j < 3; ++j) f.at(v, 3 + 3 * cu + j) += nbr_class_counts[u][j];
        f.at(v, 3 + 3 * cu + cv) -= 1; // remove the walk back to v
    }
}

} // namespace

FeatureMatrix extract_features(const Topology& t, const NodeLabelAssignment& a,
                               int threads) {
    const int n = t.node_count;
    if (static_cast<int>(a.labels.size()) != n)
        throw std::invalid_argument("extract_features: label count != node count");

    std::vector<std::array<std::int64_t, 3>> nbr_class_counts(
        n, std::array<std::int64_t, 3>{0, 0, 0});

    FeatureMatrix f;
    f.rows = n;
    f.data.assign(static_cast<std::size_t>(n) * kFeatureDim, 0);

#ifdef _OPENMP
    if (threads <= 0) threads = omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (int u = 0; u < n; ++u)
        for (int w : t.adjacency[u]) ++nbr_class_counts[u][static_cast<int>(a.labels[w])];
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
    for (int v = 0; v < n; ++v) feature_row(t, a, nbr_class_counts, v, f);
#else
    (void)threads;
    for (int u = 0; u < n; ++u)
        for (int w : t.adjacency[u]) ++nbr_class_counts[u][static_cast<int>(a.labels[w])];
    for (int v = 0; v < n; ++v) feature_row(t, a, nbr_class_counts, v, f);
#endif
    return f;
}

FeatureMatrix extract_features_serial(const Topology& t, const NodeLabelAssignment& a) {
    const int n = t.node_count;
    if (static_cast<int>(a.labels.size()) != n)
        throw std::invalid_argument("extract_features_serial: label count != node count");
    FeatureMatrix f;
    f.rows = n;
    f.data.assign(static_cast<std::size_t>(n) * kFeatureDim, 0);
    for (int v = 0; v < n; ++v) {
        for (int u : t.adjacency[v]) {
            const int cu = static_cast<int>(a.labels[u]);
            f.at(v, cu) += 1;
            for (int w : t.adjacency[u]) {
                if (w == v) continue;
                f.at(v, 3 + 3 * cu + static_cast<int>(a.labels[w])) += 1;
            }
        }
    }
    return f;
}

} // namespace dsd
