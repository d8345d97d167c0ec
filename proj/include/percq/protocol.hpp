#pragma once

// State-level simulation of the hierarchical construction: the actual Schmidt
// states carried by links built through nested swaps, their effect on border
// connectivity, and the distillation bill for restoring fidelity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "percq/engine.hpp"
#include "percq/errors.hpp"
#include "percq/percolation.hpp"
#include "percq/qstate.hpp"
#include "percq/topology.hpp"

namespace percq {

struct Perfect {};
struct Lost {};

// Perfect is the filtered form of PurePair(1/2, 1/2); Lost carries nothing.
using LinkState = std::variant<PurePair, Perfect, Lost>;

template <UniformSource Rng>
LinkState convert_link(const PurePair& state, Rng& rng) {
    if (attempt_conversion(state, rng)) return Perfect{};
    return Lost{};
}

inline bool is_open(const LinkState& s) noexcept { return std::holds_alternative<Perfect>(s); }

struct WeightedState {
    double probability;
    PurePair state;
};

struct BranchDistribution {
    std::vector<WeightedState> branches;

    double total_probability() const noexcept {
        double s = 0.0;
        for (const auto& b : branches) s += b.probability;
        return s;
    }
    double mean_scp() const noexcept {
        double s = 0.0;
        for (const auto& b : branches) s += b.probability * scp(b.state);
        return s;
    }
    double mean_concurrence() const noexcept {
        double s = 0.0;
        for (const auto& b : branches) s += b.probability * concurrence(b.state);
        return s;
    }
};

inline constexpr int kEnumerationLevelBudget = 12;
inline constexpr std::uint64_t kEnumerationPairBudget = 50'000'000;

namespace detail {

// Sorts by lambda2 and sums the weights of states equal within tol.
inline void merge_branches(std::vector<WeightedState>& v, double tol = kAlgebraTol) {
    std::sort(v.begin(), v.end(), [](const WeightedState& a, const WeightedState& b) {
        return a.state.lambda2() < b.state.lambda2();
    });
    std::vector<WeightedState> out;
    out.reserve(v.size());
    for (const auto& w : v) {
        if (w.probability <= 0.0) continue;
        if (!out.empty() && out.back().state.approx_equal(w.state, tol)) {
            out.back().probability += w.probability;
        } else {
            out.push_back(w);
        }
    }
    v = std::move(out);
}

} // namespace detail

// Exact distribution of the state on a level-`level` link, enumerating every
// Bell-outcome combination of the 2^level - 1 swaps beneath it.
inline BranchDistribution enumerate_level_distribution(const PurePair& base, int level) {
    if (level < 0) throw DomainError("level must be non-negative, got " + std::to_string(level));
    if (level > kEnumerationLevelBudget) {
        throw ResourceError("exact enumeration is limited to level " + std::to_string(kEnumerationLevelBudget) +
                            ", got " + std::to_string(level) + "; use sample_level_state instead");
    }
    BranchDistribution d{{{1.0, base}}};
    for (int l = 1; l <= level; ++l) {
        const auto n = static_cast<std::uint64_t>(d.branches.size());
        if (n * n > kEnumerationPairBudget) {
            throw ResourceError("level " + std::to_string(l) + " needs " + std::to_string(n * n) +
                                " branch combinations; use sample_level_state instead");
        }
        std::vector<WeightedState> next;
        next.reserve(static_cast<std::size_t>(4 * n * n));
        for (const auto& left : d.branches) {
            for (const auto& right : d.branches) {
                const SwapDistribution s = entanglement_swap(left.state, right.state);
                const double w = left.probability * right.probability;
                for (const auto& b : s.branches) next.push_back({w * b.probability, b.state});
            }
        }
        detail::merge_branches(next);
        d.branches = std::move(next);
    }
    return d;
}

// One draw from enumerate_level_distribution(base, level): sample the left
// half, then the right half, then the Bell outcome at the midpoint.
template <UniformSource Rng>
PurePair sample_level_state(const PurePair& base, int level, Rng& rng) {
    if (level < 0) throw DomainError("level must be non-negative, got " + std::to_string(level));
    if (level == 0) return base;
    const PurePair left = sample_level_state(base, level - 1, rng);
    const PurePair right = sample_level_state(base, level - 1, rng);
    return sample_branch(entanglement_swap(left, right), rng).state;
}

enum class ProtocolMode { IdealScp, StateTracked };

inline constexpr std::string_view to_string(ProtocolMode m) noexcept {
    return m == ProtocolMode::IdealScp ? "ideal-scp" : "state-tracked";
}

inline ProtocolMode parse_mode(std::string_view s) {
    if (s == "ideal-scp") return ProtocolMode::IdealScp;
    if (s == "state-tracked") return ProtocolMode::StateTracked;
    throw DomainError("unknown mode '" + std::string(s) + "' (expected ideal-scp or state-tracked)");
}

struct LevelStats {
    int level = 0;
    std::uint64_t samples = 0;
    double mean_scp = 0.0;
    double mean_concurrence = 0.0;
};

struct ProtocolStats {
    ProtocolMode mode = ProtocolMode::IdealScp;
    std::uint64_t trials = 0;
    double mean_scp = 0.0;
    double mean_concurrence = 0.0;
    double border_connected_fraction = 0.0;
    MCEstimate border;
    std::vector<LevelStats> levels;
};

// Runs the chain protocol on net. The link occupation probability is scp(base);
// cfg.p is ignored.
//
// ideal-scp: every link opens with probability scp(base), one draw per link in
// (level, u) order, exactly as mc_border_connectivity.
// state-tracked: each link first draws its post-swap state, then filters it.
inline ProtocolStats run_chain_protocol(const HierNet& net, const PurePair& base, ProtocolMode mode,
                                        const PercConfig& cfg) {
    require_network(net);
    if (cfg.trials < 1) throw DomainError("trials must be at least 1");
    const int n_levels = net.k_pairs;
    const double p = scp(base);

    struct Acc {
        std::uint64_t trials = 0;
        std::uint64_t successes = 0;
        std::vector<std::uint64_t> count;
        std::vector<double> scp_sum;
        std::vector<double> conc_sum;
        void merge(const Acc& o) {
            trials += o.trials;
            successes += o.successes;
            if (count.size() < o.count.size()) {
                count.resize(o.count.size());
                scp_sum.resize(o.count.size());
                conc_sum.resize(o.count.size());
            }
            for (std::size_t i = 0; i < o.count.size(); ++i) {
                count[i] += o.count[i];
                scp_sum[i] += o.scp_sum[i];
                conc_sum[i] += o.conc_sum[i];
            }
        }
    };

    const auto n = static_cast<std::size_t>(net.n_nodes);
    const auto last = static_cast<std::uint32_t>(net.n_nodes - 1);
    PercConfig run_cfg = cfg;
    run_cfg.p = p;

    auto acc = run_trials<Acc>(cfg.trials, run_cfg.run_options(), [&] {
        return [&, sets = DisjointSets(n)](std::uint64_t, TrialStream& rng, Acc& a) mutable {
            if (a.count.empty()) {
                a.count.assign(static_cast<std::size_t>(n_levels), 0);
                a.scp_sum.assign(static_cast<std::size_t>(n_levels), 0.0);
                a.conc_sum.assign(static_cast<std::size_t>(n_levels), 0.0);
            }
            sets.reset(n);
            if (mode == ProtocolMode::IdealScp) {
                open_links(net.links, p, rng, sets);
            } else {
                for (const Link& l : net.links) {
                    const PurePair state = sample_level_state(base, l.level, rng);
                    const auto lv = static_cast<std::size_t>(l.level);
                    ++a.count[lv];
                    a.scp_sum[lv] += scp(state);
                    a.conc_sum[lv] += concurrence(state);
                    if (is_open(convert_link(state, rng))) {
                        sets.unite(static_cast<std::uint32_t>(l.u), static_cast<std::uint32_t>(l.v));
                    }
                }
            }
            ++a.trials;
            if (sets.connected(0, last)) ++a.successes;
        };
    });

    ProtocolStats st;
    st.mode = mode;
    st.trials = acc.trials;
    st.border = make_estimate(acc.trials, acc.successes);
    st.border_connected_fraction = st.border.estimate;

    std::uint64_t total = 0;
    double scp_total = 0.0;
    double conc_total = 0.0;
    for (int l = 0; l < n_levels; ++l) {
        const auto links_here = static_cast<std::uint64_t>(net.count_at(l));
        LevelStats ls{l, links_here * acc.trials, p, concurrence(base)};
        if (mode == ProtocolMode::StateTracked) {
            const auto lv = static_cast<std::size_t>(l);
            ls.samples = lv < acc.count.size() ? acc.count[lv] : 0;
            if (ls.samples > 0) {
                ls.mean_scp = acc.scp_sum[lv] / static_cast<double>(ls.samples);
                ls.mean_concurrence = acc.conc_sum[lv] / static_cast<double>(ls.samples);
                scp_total += acc.scp_sum[lv];
                conc_total += acc.conc_sum[lv];
            }
        } else {
            scp_total += ls.mean_scp * static_cast<double>(ls.samples);
            conc_total += ls.mean_concurrence * static_cast<double>(ls.samples);
        }
        total += ls.samples;
        st.levels.push_back(ls);
    }
    if (total > 0) {
        st.mean_scp = scp_total / static_cast<double>(total);
        st.mean_concurrence = conc_total / static_cast<double>(total);
    }
    return st;
}

inline ProtocolStats run_chain_protocol(std::int64_t n_nodes, int k_pairs, const PurePair& base, ProtocolMode mode,
                                        const PercConfig& cfg) {
    return run_chain_protocol(build_hiernet(n_nodes, k_pairs), base, mode, cfg);
}

// Accounting model for distilling every swapped link back to the fidelity of
// the base pairs. Only Psi-type links need distillation; Phi-type links are
// already maximally entangled.
struct DistillationPlan {
    std::int64_t n_nodes = 0;
    int k_pairs = 0;
    double base_fidelity = 0.0;
    double post_swap_fidelity = 0.0;
    int iterations = 0;
    std::vector<double> trace;
    double success_probability_model = 0.25;
    std::uint64_t pairs_per_distilled_link = 0;
    std::uint64_t total_initial_pairs = 0; // 2^(K-2) m^(K-1), m = pairs_per_distilled_link
    double n6_comparator = 0.0;
};

inline constexpr int kDistillMaxIterations = 64;

inline DistillationPlan distillation_plan(std::int64_t n_nodes, const PurePair& base) {
    const double c = concurrence(base);
    if (c < 0.5 - kAlgebraTol) {
        throw DomainError("distillation plan needs concurrence >= 1/2, got " + detail::fmt_real(c));
    }
    DistillationPlan plan;
    plan.n_nodes = n_nodes;
    plan.k_pairs = required_pairs_for_full_hierarchy(n_nodes);
    plan.base_fidelity = werner_fidelity(base).value();
    plan.post_swap_fidelity = post_swap_fidelity(base).value();

    if (base.is_perfect()) {
        plan.iterations = 0;
        plan.trace = {plan.post_swap_fidelity};
        plan.pairs_per_distilled_link = 1;
    } else {
        const DistillRun run = distill_until(WernerFidelity(plan.post_swap_fidelity), plan.base_fidelity,
                                             kDistillMaxIterations);
        plan.iterations = run.iterations;
        plan.trace = run.trace;
        plan.pairs_per_distilled_link = std::max<std::uint64_t>(
            1, static_cast<std::uint64_t>(std::ceil(run.iterations / plan.success_probability_model)));
    }

    const int k = plan.k_pairs;
    if (k < 2) {
        plan.total_initial_pairs = 1;
    } else {
        const long double total = std::ldexp(1.0L, k - 2) *
                                  std::pow(static_cast<long double>(plan.pairs_per_distilled_link), k - 1);
        if (total > static_cast<long double>(std::numeric_limits<std::uint64_t>::max())) {
            throw ResourceError("initial pair count overflows 64 bits for N = " + std::to_string(n_nodes));
        }
        plan.total_initial_pairs = static_cast<std::uint64_t>(total);
    }
    plan.n6_comparator = std::pow(static_cast<double>(n_nodes), 6);
    return plan;
}

} // namespace percq
