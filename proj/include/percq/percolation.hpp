#pragma once

// Border-connectivity recursion for the hierarchical chain, its fixed points
// and transition, the concurrence-weighted variant, the plain-chain baseline,
// and the Monte Carlo engines that check them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "percq/engine.hpp"
#include "percq/errors.hpp"
#include "percq/qstate.hpp"
#include "percq/rng.hpp"
#include "percq/topology.hpp"

namespace percq {

namespace detail {

inline void require_probability(double p, std::string_view what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError(std::string(what) + " must lie in [0, 1], got " + fmt_real(p));
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Analytic recursions

struct RecursionTrace {
    double p = 0.0;
    std::vector<double> values; // P_0 .. P_kmax

    double final_value() const { return values.back(); }
};

inline double recursion_step(double p, double prev) noexcept { return p + (1.0 - p) * prev * prev; }

inline RecursionTrace recursion_iterate(double p, int k_max) {
    detail::require_probability(p, "p");
    if (k_max < 0) throw DomainError("k_max must be non-negative, got " + std::to_string(k_max));
    RecursionTrace t{p, {}};
    t.values.reserve(static_cast<std::size_t>(k_max) + 1);
    t.values.push_back(p);
    for (int k = 0; k < k_max; ++k) t.values.push_back(recursion_step(p, t.values.back()));
    return t;
}

enum class Regime { Subcritical, Critical, Supercritical };

inline constexpr std::string_view to_string(Regime r) noexcept {
    switch (r) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Critical: return "critical";
    case Regime::Supercritical: return "supercritical";
    }
    return "?";
}

inline Regime classify(double p) noexcept {
    if (p < 0.5) return Regime::Subcritical;
    if (p == 0.5) return Regime::Critical;
    return Regime::Supercritical;
}

// Closed-form limit of the recursion: p/(1-p) below one half, 1 otherwise.
inline double border_limit(double p) noexcept { return p < 0.5 ? p / (1.0 - p) : 1.0; }

struct IteratedLimit {
    double limit = 0.0;
    long iterations = 0;
    bool converged = false;
};

// Iterates the recursion from P_0 = p until successive values differ by less
// than tol (or max_iter is hit).
inline IteratedLimit iterate_to_limit(double p, double tol, long max_iter = 100'000'000) {
    detail::require_probability(p, "p");
    IteratedLimit r{p, 0, false};
    double cur = p;
    while (r.iterations < max_iter) {
        const double next = recursion_step(p, cur);
        ++r.iterations;
        const bool done = std::abs(next - cur) < tol;
        cur = next;
        if (done) {
            r.converged = true;
            break;
        }
    }
    r.limit = cur;
    return r;
}

struct FixedPointResult {
    double p = 0.0;
    double p_infinity = 0.0; // closed form
    Regime regime = Regime::Subcritical;
    IteratedLimit iterated;  // cross-check by direct iteration
};

inline FixedPointResult fixed_point(double p, double tol) {
    detail::require_probability(p, "p");
    if (!(tol > 0.0)) throw DomainError("tol must be positive, got " + detail::fmt_real(tol));
    return {p, border_limit(p), classify(p), iterate_to_limit(p, tol)};
}

// Limit of the recursion estimated by iteration with Aitken extrapolation of
// the geometric tail. Near p = 1/2 the approach is slow (rate 2 min(p, 1-p)),
// so the plain iterate alone would sit well below its limit.
inline double extrapolated_limit(double p, long max_iter = 100'000'000) {
    double prev = p;
    double cur = recursion_step(p, prev);
    double d_prev = cur - prev;
    for (long k = 1; k < max_iter; ++k) {
        const double next = recursion_step(p, cur);
        const double d = next - cur;
        cur = next;
        if (d < 1e-14 || cur >= 1.0) {
            if (d <= 0.0 || d_prev <= 0.0) return cur;
            const double rate = d / d_prev;
            if (rate >= 1.0) return cur;
            return std::min(1.0, cur + d * rate / (1.0 - rate));
        }
        d_prev = d;
    }
    return cur;
}

// True when the iterated limit stays measurably below 1 at resolution tol.
inline bool below_transition(double p, double tol) { return extrapolated_limit(p) < 1.0 - tol; }

// Locates the transition by bisection on the iterated limit.
inline double transition_point(double tol) {
    if (!(tol > 0.0)) throw DomainError("tol must be positive, got " + detail::fmt_real(tol));
    double lo = 0.0; // below
    double hi = 1.0; // not below
    // Resolve the bracket to a quarter of tol; the predicate's own blur near
    // the transition is about tol / 4.
    while (hi - lo > tol / 4.0) {
        const double mid = 0.5 * (lo + hi);
        (below_transition(mid, tol) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct ConcurrenceTrace {
    double c = 0.0;
    double alpha = 0.0;
    std::vector<double> values;
};

inline ConcurrenceTrace concurrence_iterate(double c, double alpha, int k_max) {
    detail::require_probability(c, "concurrence");
    if (!(alpha > 0.0 && alpha <= 0.5)) {
        throw DomainError("alpha must lie in (0, 1/2], got " + detail::fmt_real(alpha));
    }
    if (k_max < 0) throw DomainError("k_max must be non-negative, got " + std::to_string(k_max));
    ConcurrenceTrace t{c, alpha, {c}};
    double weight = c;
    for (int k = 0; k < k_max; ++k) {
        weight *= alpha; // alpha^(k+1) c
        const double prev = t.values.back();
        t.values.push_back(weight + (1.0 - weight) * prev * prev);
    }
    return t;
}

struct ClassicalChain {
    double exact = 0.0;         // (1 - (1-p)^K)^(N-1)
    double paper_variant = 0.0; // (p + p (1-p)^K)^(N-1)
};

inline ClassicalChain classical_chain_prob(double p, int k_pairs, std::int64_t n_nodes) {
    detail::require_probability(p, "p");
    if (k_pairs < 1) throw DomainError("need at least one pair per edge, got " + std::to_string(k_pairs));
    if (n_nodes < 2) throw DomainError("chain needs at least 2 nodes, got " + std::to_string(n_nodes));
    const double q = std::pow(1.0 - p, k_pairs);
    const double edges = static_cast<double>(n_nodes - 1);
    return {std::pow(1.0 - q, edges), std::pow(p + p * q, edges)};
}

// ---------------------------------------------------------------------------
// Monte Carlo

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n = 0) { reset(n); }

    void reset(std::size_t n) {
        parent_.resize(n);
        size_.assign(n, 1);
        std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
        largest_ = n > 0 ? 1 : 0;
    }

    std::uint32_t find(std::uint32_t x) noexcept {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::uint32_t a, std::uint32_t b) noexcept {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        largest_ = std::max(largest_, size_[a]);
    }

    bool connected(std::uint32_t a, std::uint32_t b) noexcept { return find(a) == find(b); }

    std::uint32_t largest() const noexcept { return largest_; }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
    std::uint32_t largest_ = 0;
};

struct MCEstimate {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double estimate = 0.0;
    double std_error = 0.0;
};

inline MCEstimate make_estimate(std::uint64_t trials, std::uint64_t successes) {
    MCEstimate e{trials, successes, 0.0, 0.0};
    if (trials > 0) {
        e.estimate = static_cast<double>(successes) / static_cast<double>(trials);
        e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(trials));
    }
    return e;
}

struct PercConfig {
    double p = 0.0;
    std::uint64_t trials = 1;
    std::uint64_t master_seed = 0;
    unsigned threads = 0;

    void validate() const {
        detail::require_probability(p, "p");
        if (trials < 1) throw DomainError("trials must be at least 1");
    }

    RunOptions run_options() const { return {master_seed, threads}; }
};

inline void require_network(const HierNet& net) {
    if (net.n_nodes < 2) throw DomainError("network needs at least 2 nodes");
    if (net.n_nodes > static_cast<std::int64_t>(UINT32_MAX)) throw DomainError("network too large");
}

// Opens each link independently with probability p, one draw per link in
// (level, u) order. Shared by every engine that needs bare percolation.
template <UniformSource Rng>
void open_links(std::span<const Link> links, double p, Rng& rng, DisjointSets& sets) {
    for (const Link& l : links) {
        if (rng.uniform01() < p) sets.unite(static_cast<std::uint32_t>(l.u), static_cast<std::uint32_t>(l.v));
    }
}

namespace detail {

struct CountAcc {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    void merge(const CountAcc& o) {
        trials += o.trials;
        successes += o.successes;
    }
};

} // namespace detail

// Probability that nodes 0 and N-1 are joined by open links.
inline MCEstimate mc_border_connectivity(const HierNet& net, const PercConfig& cfg) {
    require_network(net);
    cfg.validate();
    const auto n = static_cast<std::size_t>(net.n_nodes);
    const auto last = static_cast<std::uint32_t>(net.n_nodes - 1);
    auto acc = run_trials<detail::CountAcc>(cfg.trials, cfg.run_options(), [&] {
        return [&, sets = DisjointSets(n)](std::uint64_t, TrialStream& rng, detail::CountAcc& a) mutable {
            sets.reset(n);
            open_links(net.links, cfg.p, rng, sets);
            ++a.trials;
            if (sets.connected(0, last)) ++a.successes;
        };
    });
    return make_estimate(acc.trials, acc.successes);
}

struct PairConnectivity {
    MCEstimate pairs;                       // over all sampled node pairs
    double largest_component_fraction = 0.0; // mean over trials
};

// Fraction of uniformly sampled distinct node pairs joined by open links.
inline PairConnectivity mc_pair_connectivity(const HierNet& net, const PercConfig& cfg, std::uint64_t sample_pairs) {
    require_network(net);
    cfg.validate();
    if (sample_pairs < 1) throw DomainError("sample_pairs must be at least 1");

    struct Acc {
        std::uint64_t samples = 0;
        std::uint64_t connected = 0;
        std::uint64_t largest_sum = 0;
        std::uint64_t trials = 0;
        void merge(const Acc& o) {
            samples += o.samples;
            connected += o.connected;
            largest_sum += o.largest_sum;
            trials += o.trials;
        }
    };

    const auto n = static_cast<std::size_t>(net.n_nodes);
    const double nd = static_cast<double>(n);
    auto acc = run_trials<Acc>(cfg.trials, cfg.run_options(), [&] {
        return [&, sets = DisjointSets(n)](std::uint64_t, TrialStream& rng, Acc& a) mutable {
            sets.reset(n);
            open_links(net.links, cfg.p, rng, sets);
            for (std::uint64_t s = 0; s < sample_pairs; ++s) {
                const auto x = std::min(n - 1, static_cast<std::size_t>(rng.uniform01() * nd));
                auto y = std::min(n - 2, static_cast<std::size_t>(rng.uniform01() * (nd - 1.0)));
                if (y >= x) ++y;
                ++a.samples;
                if (sets.connected(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y))) ++a.connected;
            }
            a.largest_sum += sets.largest();
            ++a.trials;
        };
    });
    return {make_estimate(acc.samples, acc.connected),
            static_cast<double>(acc.largest_sum) / (static_cast<double>(acc.trials) * nd)};
}

} // namespace percq
