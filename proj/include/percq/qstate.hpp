#pragma once

// Two-qubit pure states in Schmidt form  sqrt(l1)|00> + sqrt(l2)|11>,
// their entanglement measures, local filtering to a singlet, Bell-measurement
// entanglement swapping, and the Werner-fidelity distillation iteration.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "percq/errors.hpp"
#include "percq/rng.hpp"

namespace percq {

inline constexpr double kAlgebraTol = 1e-12;

namespace detail {

// Shortest text that parses back to x.
inline std::string fmt_real(double x) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

} // namespace detail

class PurePair {
public:
    // Validating constructor; coefficients must already be ordered and normalized.
    PurePair(double lambda1, double lambda2) : l1_(lambda1), l2_(lambda2) {
        if (!(lambda2 >= 0.0) || !(lambda1 >= lambda2) || std::abs(lambda1 + lambda2 - 1.0) > kAlgebraTol) {
            throw DomainError("invalid Schmidt coefficients (" + detail::fmt_real(lambda1) + ", " +
                              detail::fmt_real(lambda2) + ")");
        }
    }

    // Builds a pair from two non-negative unnormalized squared amplitudes in
    // either order.
    static PurePair from_weights(double w1, double w2) {
        const double s = w1 + w2;
        if (!(w1 >= 0.0) || !(w2 >= 0.0) || !(s > 0.0)) {
            throw DomainError("Schmidt weights must be non-negative with positive sum, got (" +
                              detail::fmt_real(w1) + ", " + detail::fmt_real(w2) + ")");
        }
        const double hi = std::max(w1, w2);
        const double lo = std::min(w1, w2);
        return PurePair(hi / s, lo / s);
    }

    static PurePair perfect() { return PurePair(0.5, 0.5); }

    double lambda1() const noexcept { return l1_; }
    double lambda2() const noexcept { return l2_; }

    bool is_perfect() const noexcept { return l2_ == 0.5; }

    bool approx_equal(const PurePair& o, double tol = kAlgebraTol) const noexcept {
        return std::abs(l2_ - o.l2_) <= tol;
    }

    friend bool operator==(const PurePair&, const PurePair&) = default;

private:
    double l1_;
    double l2_;
};

inline PurePair make_pair(double lambda2) {
    if (!(lambda2 >= 0.0 && lambda2 <= 0.5)) {
        throw DomainError("lambda2 must lie in [0, 1/2], got " + detail::fmt_real(lambda2));
    }
    return PurePair(1.0 - lambda2, lambda2);
}

// Singlet conversion probability.
inline double scp(const PurePair& p) noexcept { return 2.0 * p.lambda2(); }

inline double concurrence(const PurePair& p) noexcept {
    return 2.0 * std::sqrt(p.lambda1() * p.lambda2());
}

// Per-swap concurrence reduction factor.
inline double alpha(const PurePair& p) noexcept { return std::sqrt(p.lambda1() * p.lambda2()); }

// Concurrence attributed to an equal-pair swap, 2 l1 l2 (= alpha * C).
inline double swap_concurrence(const PurePair& p) noexcept {
    return 2.0 * p.lambda1() * p.lambda2();
}

using Mat2 = std::array<std::array<double, 2>, 2>;

struct ConversionOperators {
    Mat2 m1{};
    Mat2 m2{};
};

// Two-outcome filter on one qubit; outcome m1 leaves the pair maximally
// entangled with probability scp(p).
inline ConversionOperators conversion_operators(const PurePair& p) {
    const double ratio = p.lambda2() / p.lambda1();
    ConversionOperators ops;
    ops.m1 = {{{std::sqrt(ratio), 0.0}, {0.0, 1.0}}};
    ops.m2 = {{{std::sqrt(1.0 - ratio), 0.0}, {0.0, 0.0}}};
    return ops;
}

// Filters the pair: returns the perfect pair with probability scp(p), or
// nothing when the link is lost. Consumes exactly one uniform draw.
template <UniformSource Rng>
std::optional<PurePair> attempt_conversion(const PurePair& p, Rng& rng) {
    if (rng.uniform01() < scp(p)) return PurePair::perfect();
    return std::nullopt;
}

enum class BellOutcome { PsiPlus, PsiMinus, PhiPlus, PhiMinus };

inline constexpr std::array<BellOutcome, 4> kBellOutcomes{
    BellOutcome::PsiPlus, BellOutcome::PsiMinus, BellOutcome::PhiPlus, BellOutcome::PhiMinus};

inline constexpr std::string_view to_string(BellOutcome o) noexcept {
    switch (o) {
    case BellOutcome::PsiPlus: return "Psi+";
    case BellOutcome::PsiMinus: return "Psi-";
    case BellOutcome::PhiPlus: return "Phi+";
    case BellOutcome::PhiMinus: return "Phi-";
    }
    return "?";
}

inline constexpr bool is_psi(BellOutcome o) noexcept {
    return o == BellOutcome::PsiPlus || o == BellOutcome::PsiMinus;
}

struct SwapBranch {
    BellOutcome outcome;
    double probability;
    PurePair state;
};

struct SwapDistribution {
    std::array<SwapBranch, 4> branches;

    double total_probability() const noexcept {
        double s = 0.0;
        for (const auto& b : branches) s += b.probability;
        return s;
    }
};

// Bell measurement on the two inner qubits of a (x)-(y) chain.
//
// Psi outcomes (|00> +- |11>) leave weights {a1 b1, a2 b2}; Phi outcomes
// (|01> +- |10>) leave {a1 b2, a2 b1}. Each sign occurs with half the
// weight of its pair. For a == b the Phi states are maximally entangled.
inline SwapDistribution entanglement_swap(const PurePair& a, const PurePair& b) {
    const double psi_w1 = a.lambda1() * b.lambda1();
    const double psi_w2 = a.lambda2() * b.lambda2();
    const double phi_w1 = a.lambda1() * b.lambda2();
    const double phi_w2 = a.lambda2() * b.lambda1();

    const double psi_total = psi_w1 + psi_w2;
    const double phi_total = phi_w1 + phi_w2;

    // psi_total >= 1/2 always; phi_total vanishes only when both pairs are
    // product states, in which case the branch never fires. Equal inputs give
    // bit-identical Phi weights, hence exactly (1/2, 1/2).
    const PurePair psi_state = PurePair::from_weights(psi_w1, psi_w2);
    const PurePair phi_state = phi_total > 0.0 ? PurePair::from_weights(phi_w1, phi_w2)
                                               : PurePair::perfect();
    return SwapDistribution{{{
        {BellOutcome::PsiPlus, psi_total / 2.0, psi_state},
        {BellOutcome::PsiMinus, psi_total / 2.0, psi_state},
        {BellOutcome::PhiPlus, phi_total / 2.0, phi_state},
        {BellOutcome::PhiMinus, phi_total / 2.0, phi_state},
    }}};
}

inline double avg_scp_after_swap(const SwapDistribution& d) noexcept {
    double s = 0.0;
    for (const auto& b : d.branches) s += b.probability * scp(b.state);
    return s;
}

// Draws one Bell outcome of entanglement_swap(a, b). Consumes exactly one uniform draw.
template <UniformSource Rng>
const SwapBranch& sample_branch(const SwapDistribution& d, Rng& rng) {
    const double u = rng.uniform01();
    double acc = 0.0;
    for (const auto& b : d.branches) {
        acc += b.probability;
        if (u < acc) return b;
    }
    // u landed in the rounding gap above the last cumulative sum.
    for (auto it = d.branches.rbegin(); it != d.branches.rend(); ++it) {
        if (it->probability > 0.0) return *it;
    }
    return d.branches.back();
}

class WernerFidelity {
public:
    explicit WernerFidelity(double f) : f_(f) {
        if (!(f >= 0.25 && f <= 1.0)) {
            throw DomainError("Werner fidelity must lie in [1/4, 1], got " + detail::fmt_real(f));
        }
    }
    double value() const noexcept { return f_; }

private:
    double f_;
};

inline WernerFidelity werner_fidelity(const PurePair& p) {
    return WernerFidelity((1.0 + concurrence(p)) / 2.0);
}

// One round of recurrence distillation on Werner pairs of fidelity f.
inline WernerFidelity distill_step(WernerFidelity f) {
    const double x = f.value();
    const double y = 1.0 - x;
    const double num = x * x + y * y / 9.0;
    const double den = x * x + 2.0 * x * y / 3.0 + 5.0 * y * y / 9.0;
    return WernerFidelity(std::min(1.0, num / den));
}

inline WernerFidelity distill_step(double f) { return distill_step(WernerFidelity(f)); }

struct DistillRun {
    int iterations = 0;
    std::vector<double> trace; // F(0) .. F(iterations)
};

// Applies distill_step until the fidelity strictly exceeds target.
inline DistillRun distill_until(WernerFidelity f0, double target, int max_iter) {
    if (!(f0.value() > 0.5)) {
        throw DomainError("distillation needs F > 1/2, got " + detail::fmt_real(f0.value()));
    }
    if (!(target <= 1.0)) {
        throw DomainError("distillation target must not exceed 1, got " + detail::fmt_real(target));
    }
    DistillRun run;
    WernerFidelity f = f0;
    run.trace.push_back(f.value());
    while (!(f.value() > target)) {
        if (run.iterations >= max_iter) {
            throw IterationLimitError("fidelity " + detail::fmt_real(f.value()) + " did not exceed " +
                                          detail::fmt_real(target) + " within " +
                                          std::to_string(max_iter) + " iterations",
                                      f.value(), run.iterations);
        }
        f = distill_step(f);
        run.trace.push_back(f.value());
        ++run.iterations;
    }
    return run;
}

// Fidelity of the Psi-branch state left by swapping two copies of p.
inline WernerFidelity post_swap_fidelity(const PurePair& p) {
    return werner_fidelity(entanglement_swap(p, p).branches[0].state);
}

} // namespace percq
