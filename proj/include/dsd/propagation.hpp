#ifndef DSD_PROPAGATION_HPP
#define DSD_PROPAGATION_HPP

#include <cstdint>
#include <vector>

#include "dsd/topology.hpp"

namespace dsd {

enum class Scenario { NoAttack, Attack };

// Per-delivery delay law. UniformJitter draws from [0.5, 1.5] * latency_mean;
// Exponential draws with the given mean. Exponential latencies let hub nodes
// quench the losing transaction almost immediately (min over hundreds of
// draws), which collapses most attack partitions to a handful of nodes; the
// bounded-jitter model keeps the race competitive and is the default.
enum class LatencyModel { UniformJitter, Exponential };

enum class TxKind : std::uint8_t { Pay, Attack };

enum class GraphLabel : std::uint8_t {
    NoAttackAllHavePay, // positive class: every mempool holds tx_pay
    AttackPresent
};

struct ScenarioParams {
    Scenario scenario = Scenario::NoAttack;
    int pay_origin = 0;
    int attack_origin = 0;     // Attack only; must differ from pay_origin
    double attack_delay = 0.0; // Attack only; injection time of tx_attack
    double latency_mean = 1.0; // mean per-delivery delay
    LatencyModel latency_model = LatencyModel::UniformJitter;
    std::uint64_t seed = 0;
};

struct PropagationOutcome {
    std::vector<TxKind> holds; // one entry per node, defined at quiescence
    GraphLabel graph_label = GraphLabel::NoAttackAllHavePay;
    int pay_holder_count = 0;
};

// Event-driven gossip of tx_pay vs tx_attack with first-seen mempools.
// tx_pay enters at pay_origin at t=0; in Attack scenarios tx_attack enters at
// attack_origin at t=attack_delay and that node adopts it unconditionally.
// A node accepting a transaction relays it to every neighbor after an
// independent exponential delay. Runs to quiescence; deterministic per seed.
// Throws std::invalid_argument on a disconnected topology or bad origins.
PropagationOutcome run_propagation(const Topology& t, const ScenarioParams& p);

GraphLabel graph_label_of(const PropagationOutcome& o, int node_count);

} // namespace dsd

#endif
