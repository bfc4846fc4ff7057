#include "dsd/topology.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "dsd/rng.hpp"

namespace dsd {

Topology generate_ba(int n, int m, std::uint64_t seed) {
    if (m < 1 || n <= m)
        throw std::invalid_argument("generate_ba: require n > m >= 1");

    Topology t;
    t.node_count = n;
    t.ba_m = m;
    t.seed = seed;
    t.adjacency.assign(n, {});

    Rng rng(derive_seed(seed, 0x1111));

    // Every accepted edge contributes both endpoints; sampling this list
    // uniformly is preferential attachment.
    std::vector<int> endpoints;
    endpoints.reserve(2ull * m * (n - m));

    std::vector<int> targets;
    targets.reserve(m);
    for (int v = m; v < n; ++v) {
        targets.clear();
        while (static_cast<int>(targets.size()) < m) {
            int cand;
            if (endpoints.empty()) {
                cand = static_cast<int>(rng.next_below(v));
            } else {
                cand = endpoints[rng.next_below(endpoints.size())];
            }
            if (std::find(targets.begin(), targets.end(), cand) == targets.end())
                targets.push_back(cand);
        }
        for (int u : targets) {
            t.adjacency[v].push_back(u);
            t.adjacency[u].push_back(v);
            endpoints.push_back(v);
            endpoints.push_back(u);
        }
    }

    for (auto& nbrs : t.adjacency) std::sort(nbrs.begin(), nbrs.end());
    return t;
}

bool is_connected(const Topology& t) {
    if (t.node_count == 0) return true;
    std::vector<char> seen(t.node_count, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int u : t.adjacency[v]) {
            if (!seen[u]) {
                seen[u] = 1;
                ++count;
                q.push(u);
            }
        }
    }
    return count == t.node_count;
}

std::vector<std::string> validate_topology(const Topology& t) {
    std::vector<std::string> report;
    bool self_loop = false, duplicate = false, asymmetric = false, unsorted = false;
    for (int v = 0; v < t.node_count; ++v) {
        const auto& nbrs = t.adjacency[v];
        if (!std::is_sorted(nbrs.begin(), nbrs.end())) unsorted = true;
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            int u = nbrs[i];
            if (u == v) self_loop = true;
            if (i > 0 && nbrs[i] == nbrs[i - 1]) duplicate = true;
            if (u < 0 || u >= t.node_count ||
                !std::binary_search(t.adjacency[u].begin(), t.adjacency[u].end(), v))
                asymmetric = true;
        }
    }
    if (self_loop) report.push_back("self-loop");
    if (duplicate) report.push_back("duplicate-neighbor");
    if (asymmetric) report.push_back("asymmetric");
    if (unsorted) report.push_back("unsorted-adjacency");
    if (!is_connected(t)) report.push_back("disconnected");
    if (t.ba_m > 0 &&
        t.edge_count() != static_cast<std::size_t>(t.ba_m) * (t.node_count - t.ba_m))
        report.push_back("edge-count");
    return report;
}

DegreeStats degree_stats(const Topology& t) {
    DegreeStats s;
    s.min_degree = std::numeric_limits<int>::max();
    s.max_degree = 0;
    double sum = 0.0;
    for (int v = 0; v < t.node_count; ++v) {
        int d = t.degree(v);
        ++s.histogram[d];
        s.min_degree = std::min(s.min_degree, d);
        s.max_degree = std::max(s.max_degree, d);
        sum += d;
    }
    if (t.node_count == 0) s.min_degree = 0;
    s.mean_degree = t.node_count ? sum / t.node_count : 0.0;

    // log-log least squares over well-populated degrees
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int k = 0;
    for (const auto& [deg, count] : s.histogram) {
        if (deg < 1 || count < 5) continue;
        double x = std::log(static_cast<double>(deg));
        double y = std::log(static_cast<double>(count));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++k;
    }
    if (k >= 2 && k * sxx - sx * sx > 0)
        s.loglog_slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    else
        s.loglog_slope = std::numeric_limits<double>::quiet_NaN();
    return s;
}

double estimate_avg_path_length(const Topology& t, int sources, std::uint64_t seed) {
    if (t.node_count < 2) return 0.0;
    Rng rng(derive_seed(seed, 0x2222));
    double total = 0.0;
    std::size_t pairs = 0;
    std::vector<int> dist(t.node_count);
    for (int s = 0; s < sources; ++s) {
        int src = static_cast<int>(rng.next_below(t.node_count));
        std::fill(dist.begin(), dist.end(), -1);
        std::queue<int> q;
        q.push(src);
        dist[src] = 0;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int u : t.adjacency[v]) {
                if (dist[u] < 0) {
                    dist[u] = dist[v] + 1;
                    q.push(u);
                }
            }
        }
        for (int v = 0; v < t.node_count; ++v) {
            if (v != src && dist[v] > 0) {
                total += dist[v];
                ++pairs;
            }
        }
    }
    return pairs ? total / static_cast<double>(pairs) : 0.0;
}

void write_topology(std::ostream& os, const Topology& t) {
    os << t.node_count << ' ' << t.ba_m << ' ' << t.seed << '\n';
    for (int u = 0; u < t.node_count; ++u)
        for (int v : t.adjacency[u])
            if (u < v) os << u << ' ' << v << '\n';
}

Topology read_topology(std::istream& is) {
    Topology t;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("topology file: empty");
    {
        std::istringstream header(line);
        if (!(header >> t.node_count >> t.ba_m >> t.seed) || t.node_count < 0)
            throw std::runtime_error("topology file: bad header");
    }
    t.adjacency.assign(t.node_count, {});
    int u, v;
    while (is >> u >> v) {
        if (u < 0 || v < 0 || u >= t.node_count || v >= t.node_count)
            throw std::runtime_error("topology file: edge endpoint out of range");
        t.adjacency[u].push_back(v);
        t.adjacency[v].push_back(u);
    }
    for (auto& nbrs : t.adjacency) std::sort(nbrs.begin(), nbrs.end());
    return t;
}

} // namespace dsd
