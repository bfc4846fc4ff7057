#ifndef DSD_OBSERVATION_HPP
#define DSD_OBSERVATION_HPP

#include <cstdint>
#include <vector>

#include "dsd/propagation.hpp"
#include "dsd/topology.hpp"

namespace dsd {

// Three-valued node labels. The class index orders the label values
// 0.0 < 0.5 < 1.0, which fixes the feature-column layout below.
enum class NodeLabel : std::uint8_t {
    ObserverWithoutPay = 0, // 0.0
    NonObserver = 1,        // 0.5
    ObserverWithPay = 2     // 1.0
};

inline double label_value(NodeLabel l) { return static_cast<int>(l) * 0.5; }

struct NodeLabelAssignment {
    std::vector<NodeLabel> labels; // one per node
    std::vector<int> observers;    // sorted ascending
};

// Per-node feature layout, 12 integer counts:
//   columns 0-2: neighbors with label 0.0 / 0.5 / 1.0
//   columns 3-11: non-backtracking 2-hop walks (u,w), u in N(v), w in N(u),
//   w != v, keyed row-major by (label(u), label(w)) over (0.0, 0.5, 1.0)^2.
// Walk multiplicity counts: a node w reachable through several u counts once
// per walk.
inline constexpr int kFeatureDim = 12;

struct FeatureMatrix {
    int rows = 0;
    std::vector<std::int64_t> data; // row-major rows x kFeatureDim

    std::int64_t& at(int r, int c) { return data[static_cast<std::size_t>(r) * kFeatureDim + c]; }
    std::int64_t at(int r, int c) const { return data[static_cast<std::size_t>(r) * kFeatureDim + c]; }
};

// k distinct node indices, uniform without replacement, sorted.
// Throws std::invalid_argument unless 1 <= k <= n.
std::vector<int> select_observers(int n, int k, std::uint64_t seed);

// Observers get 1.0 when holding tx_pay, 0.0 otherwise; everyone else 0.5.
NodeLabelAssignment assign_labels(const PropagationOutcome& o,
                                  const std::vector<int>& observers);

// O(E) per-node pass, parallelized over rows. threads <= 0 means the OpenMP
// default.
FeatureMatrix extract_features(const Topology& t, const NodeLabelAssignment& a,
                               int threads = 0);

// Straightforward single-threaded reference; kept for tests and benchmarks.
FeatureMatrix extract_features_serial(const Topology& t, const NodeLabelAssignment& a);

} // namespace dsd

#endif
