#pragma once

// Hierarchical link network over an N-node chain. Level 0 holds the physical
// nearest-neighbour links; a level-l link spans 2^l edges between nodes that
// are multiples of 2^l, and is produced by swapping at its midpoint.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "percq/errors.hpp"

namespace percq {

struct Link {
    int level = 0;
    std::int64_t u = 0;
    std::int64_t v = 0;

    std::int64_t span() const noexcept { return v - u; }

    bool well_formed() const noexcept {
        if (level < 0 || level > 62 || u < 0 || v <= u) return false;
        const std::int64_t s = std::int64_t{1} << level;
        return v - u == s && u % s == 0;
    }

    friend bool operator==(const Link&, const Link&) = default;
    friend auto operator<=>(const Link& a, const Link& b) {
        return std::tie(a.level, a.u, a.v) <=> std::tie(b.level, b.u, b.v);
    }
};

// Links are kept sorted by (level, u); the Monte Carlo engines draw one
// variate per link in this order.
struct HierNet {
    std::int64_t n_nodes = 0;
    int k_pairs = 0;
    std::vector<Link> links;

    int max_level() const noexcept { return k_pairs - 1; }

    std::int64_t count_at(int level) const noexcept {
        return std::count_if(links.begin(), links.end(),
                             [level](const Link& l) { return l.level == level; });
    }
};

inline HierNet build_hiernet(std::int64_t n_nodes, int k_pairs) {
    if (n_nodes < 2) throw DomainError("hierarchical network needs at least 2 nodes, got " + std::to_string(n_nodes));
    if (k_pairs < 1) throw DomainError("need at least one pair per edge, got " + std::to_string(k_pairs));
    if (k_pairs > 62) throw DomainError("pairs per edge limited to 62, got " + std::to_string(k_pairs));

    HierNet net{n_nodes, k_pairs, {}};
    const std::int64_t edges = n_nodes - 1;
    for (int level = 0; level < k_pairs; ++level) {
        const std::int64_t span = std::int64_t{1} << level;
        for (std::int64_t u = 0; u + span <= edges; u += span) net.links.push_back({level, u, u + span});
    }
    return net;
}

struct SwapStep {
    int level;
    std::int64_t midpoint;
    Link left;
    Link right;
    Link result;
};

using SwapSchedule = std::vector<SwapStep>;

inline SwapSchedule swap_schedule(const HierNet& net) {
    SwapSchedule steps;
    for (const Link& l : net.links) {
        if (l.level == 0) continue;
        const std::int64_t mid = l.u + (std::int64_t{1} << (l.level - 1));
        steps.push_back({l.level, mid, {l.level - 1, l.u, mid}, {l.level - 1, mid, l.v}, l});
    }
    return steps;
}

// Rebuilds the network from its level-0 chain by executing the schedule;
// throws if a step consumes a link that does not exist yet.
inline HierNet replay_schedule(std::int64_t n_nodes, int k_pairs, const SwapSchedule& steps) {
    HierNet net = build_hiernet(n_nodes, 1);
    net.k_pairs = k_pairs;
    std::set<Link> have(net.links.begin(), net.links.end());
    for (const SwapStep& s : steps) {
        if (!have.contains(s.left) || !have.contains(s.right)) {
            throw DomainError("swap at node " + std::to_string(s.midpoint) + " consumes a missing link");
        }
        have.insert(s.result);
    }
    net.links.assign(have.begin(), have.end());
    return net;
}

inline int required_pairs_for_full_hierarchy(std::int64_t n_nodes) {
    const std::int64_t edges = n_nodes - 1;
    if (edges < 1 || (edges & (edges - 1)) != 0) {
        throw DomainError("full hierarchy needs N = 2^m + 1 nodes, got " + std::to_string(n_nodes) +
                          "; build with truncation (build_hiernet) instead");
    }
    int m = 0;
    while ((std::int64_t{1} << m) < edges) ++m;
    return 1 + m;
}

struct ResourceReport {
    std::int64_t n_nodes = 0;
    int pairs_per_edge = 0;
    std::int64_t total_base_pairs = 0;
    double paper_estimate = 0.0; // N (1 + log2(N - 1)), a scaling estimate
    double n_squared = 0.0;
};

inline ResourceReport resource_report(std::int64_t n_nodes, int k_pairs) {
    if (n_nodes < 2) throw DomainError("resource report needs at least 2 nodes, got " + std::to_string(n_nodes));
    if (k_pairs < 1) throw DomainError("need at least one pair per edge, got " + std::to_string(k_pairs));
    const double n = static_cast<double>(n_nodes);
    return {n_nodes, k_pairs, (n_nodes - 1) * k_pairs, n * (1.0 + std::log2(n - 1.0)), n * n};
}

// Text format:
//   hiernet N K
//   level u v      (one line per link, ordered by (level, u))
inline void write_hiernet(std::ostream& os, const HierNet& net) {
    os << "hiernet " << net.n_nodes << ' ' << net.k_pairs << '\n';
    for (const Link& l : net.links) os << l.level << ' ' << l.u << ' ' << l.v << '\n';
}

inline HierNet read_hiernet(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw DomainError("empty hiernet input");
    std::istringstream header(line);
    std::string tag;
    HierNet net;
    if (!(header >> tag >> net.n_nodes >> net.k_pairs) || tag != "hiernet") {
        throw DomainError("bad hiernet header: '" + line + "'");
    }
    if (net.n_nodes < 2 || net.k_pairs < 1) throw DomainError("bad hiernet header: '" + line + "'");

    std::set<Link> seen;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream row(line);
        Link l;
        std::string extra;
        if (!(row >> l.level >> l.u >> l.v) || (row >> extra)) {
            throw DomainError("hiernet line " + std::to_string(lineno) + ": expected 'level u v'");
        }
        if (!l.well_formed() || l.v > net.n_nodes - 1 || l.level >= net.k_pairs) {
            throw DomainError("hiernet line " + std::to_string(lineno) + ": invalid link");
        }
        if (!seen.insert(l).second) {
            throw DomainError("hiernet line " + std::to_string(lineno) + ": duplicate link");
        }
    }
    net.links.assign(seen.begin(), seen.end());
    return net;
}

} // namespace percq
