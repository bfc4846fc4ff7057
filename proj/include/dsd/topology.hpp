#ifndef DSD_TOPOLOGY_HPP
#define DSD_TOPOLOGY_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace dsd {

// Undirected simple graph standing in for the Bitcoin P2P overlay.
// Adjacency lists are sorted ascending; immutable after construction.
struct Topology {
    int node_count = 0;
    int ba_m = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<int>> adjacency;

    int degree(int v) const { return static_cast<int>(adjacency[v].size()); }

    std::size_t edge_count() const {
        std::size_t s = 0;
        for (const auto& nbrs : adjacency) s += nbrs.size();
        return s / 2;
    }
};

struct DegreeStats {
    std::map<int, std::size_t> histogram;
    int min_degree = 0;
    int max_degree = 0;
    double mean_degree = 0.0;
    // Least-squares slope of log(count) vs log(degree) over degrees with
    // count >= 5; NaN when fewer than two such degrees exist.
    double loglog_slope = 0.0;
};

// Barabasi-Albert generator. Starts from m isolated nodes; each new node
// attaches m distinct edges by preferential attachment (uniform sampling of
// the repeated-endpoints list; uniform over existing nodes while that list
// is empty). Yields exactly m*(n-m) edges and a connected graph.
// Throws std::invalid_argument unless n > m >= 1.
Topology generate_ba(int n, int m, std::uint64_t seed);

// Names of violated Topology invariants; empty when the graph is valid.
// Possible entries: "self-loop", "duplicate-neighbor", "asymmetric",
// "unsorted-adjacency", "disconnected", "edge-count".
std::vector<std::string> validate_topology(const Topology& t);

DegreeStats degree_stats(const Topology& t);

bool is_connected(const Topology& t);

// Mean BFS distance from `sources` sampled start nodes; used to size the
// attack-injection delay window.
double estimate_avg_path_length(const Topology& t, int sources, std::uint64_t seed);

// Text format: line 1 "n m seed", then one "u v" line per edge with u < v,
// sorted lexicographically. Round-trips bit-exactly.
void write_topology(std::ostream& os, const Topology& t);
Topology read_topology(std::istream& is);

} // namespace dsd

#endif
