#pragma once

// Grid sweep over the occupation probability, pairing each Monte Carlo border
// estimate with its analytic prediction and the plain-chain baseline.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "percq/percolation.hpp"
#include "percq/serialize.hpp"
#include "percq/topology.hpp"

namespace percq {

struct SweepSpec {
    double p_min = 0.0;
    double p_max = 1.0;
    int steps = 1;
    std::uint64_t trials = 1;
    std::uint64_t master_seed = 0;
    unsigned threads = 0;

    void validate() const {
        detail::require_probability(p_min, "p_min");
        detail::require_probability(p_max, "p_max");
        if (p_min > p_max) throw DomainError("p_min must not exceed p_max");
        if (steps < 1) throw DomainError("steps must be at least 1");
        if (trials < 1) throw DomainError("trials must be at least 1");
    }

    double p_at(int i) const {
        if (steps == 1) return p_min;
        if (i == steps - 1) return p_max;
        return p_min + (p_max - p_min) * static_cast<double>(i) / static_cast<double>(steps - 1);
    }
};

struct SweepRow {
    double p = 0.0;
    MCEstimate mc;
    double prediction = 0.0; // recursion P_{K-1}
    double p_infinity = 0.0;
    Regime regime = Regime::Subcritical;
    ClassicalChain classical;
};

// Every row reuses the master seed, so neighbouring rows share random numbers.
inline std::vector<SweepRow> run_sweep(const HierNet& net, const SweepSpec& spec) {
    spec.validate();
    require_network(net);
    std::vector<SweepRow> rows;
    rows.reserve(static_cast<std::size_t>(spec.steps));
    for (int i = 0; i < spec.steps; ++i) {
        const double p = spec.p_at(i);
        SweepRow r;
        r.p = p;
        r.mc = mc_border_connectivity(net, PercConfig{p, spec.trials, spec.master_seed, spec.threads});
        r.prediction = recursion_iterate(p, net.k_pairs - 1).final_value();
        r.p_infinity = border_limit(p);
        r.regime = classify(p);
        r.classical = classical_chain_prob(p, net.k_pairs, net.n_nodes);
        rows.push_back(r);
    }
    return rows;
}

inline void write_sweep_csv(std::ostream& os, const HierNet& net, const std::vector<SweepRow>& rows) {
    auto header = mc_csv_header();
    for (const char* extra : {"n", "p_infinity", "regime", "classical_exact", "classical_paper_variant"}) {
        header.emplace_back(extra);
    }
    write_csv_row(os, header);
    for (const SweepRow& r : rows) {
        auto f = mc_csv_fields(r.p, net.k_pairs, r.mc, r.prediction);
        f.push_back(std::to_string(net.n_nodes));
        f.push_back(format_real(r.p_infinity));
        f.emplace_back(to_string(r.regime));
        f.push_back(format_real(r.classical.exact));
        f.push_back(format_real(r.classical.paper_variant));
        write_csv_row(os, f);
    }
}

} // namespace percq
