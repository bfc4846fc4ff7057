#include "dsd/propagation.hpp"

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

#include "dsd/rng.hpp"

namespace dsd {

namespace {

struct Event {
    double time;
    std::uint64_t seq; // insertion order breaks time ties
    int node;
    TxKind tx;
    bool forced; // attacker's own injection overrides first-seen
};

struct EventLater {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        return a.seq > b.seq;
    }
};

} // namespace

PropagationOutcome run_propagation(const Topology& t, const ScenarioParams& p) {
    const int n = t.node_count;
    if (p.latency_mean <= 0.0)
        throw std::invalid_argument("run_propagation: latency_mean must be positive");
    if (p.pay_origin < 0 || p.pay_origin >= n)
        throw std::invalid_argument("run_propagation: pay_origin out of range");
    if (p.scenario == Scenario::Attack) {
        if (p.attack_origin < 0 || p.attack_origin >= n)
            throw std::invalid_argument("run_propagation: attack_origin out of range");
        if (p.attack_origin == p.pay_origin)
            throw std::invalid_argument("run_propagation: attack_origin equals pay_origin");
        if (p.attack_delay < 0.0)
            throw std::invalid_argument("run_propagation: attack_delay must be non-negative");
    }
    if (!is_connected(t))
        throw std::invalid_argument("run_propagation: topology is disconnected");

    Rng rng(derive_seed(p.seed, 0x3333));

    std::vector<char> has_tx(n, 0);
    std::vector<TxKind> holds(n, TxKind::Pay);

    std::priority_queue<Event, std::vector<Event>, EventLater> queue;
    std::uint64_t seq = 0;
    queue.push({0.0, seq++, p.pay_origin, TxKind::Pay, false});
    if (p.scenario == Scenario::Attack)
        queue.push({p.attack_delay, seq++, p.attack_origin, TxKind::Attack, true});

    while (!queue.empty()) {
        Event ev = queue.top();
        queue.pop();
        // first-seen: conflicting tx is ignored, except at the attacker node
        if (has_tx[ev.node] && !(ev.forced && holds[ev.node] != ev.tx)) continue;
        has_tx[ev.node] = 1;
        holds[ev.node] = ev.tx;
        for (int u : t.adjacency[ev.node]) {
            const double delay = p.latency_model == LatencyModel::Exponential
                                     ? rng.next_exp(p.latency_mean)
                                     : p.latency_mean * (0.5 + rng.next_unit());
            queue.push({ev.time + delay, seq++, u, ev.tx, false});
        }
    }

    PropagationOutcome out;
    out.holds = std::move(holds);
    out.pay_holder_count = 0;
    for (int v = 0; v < n; ++v)
        if (has_tx[v] && out.holds[v] == TxKind::Pay) ++out.pay_holder_count;
    out.graph_label = graph_label_of(out, n);
    return out;
}

GraphLabel graph_label_of(const PropagationOutcome& o, int node_count) {
    return o.pay_holder_count == node_count ? GraphLabel::NoAttackAllHavePay
                                            : GraphLabel::AttackPresent;
}

} // namespace dsd
