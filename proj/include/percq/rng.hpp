#pragma once

#include <concepts>
#include <cstdint>
#include <limits>
#include <string_view>

namespace percq {

// Identifier of the per-trial stream derivation. Golden outputs in the test
// suites are pinned to this scheme; bump the suffix if the mixing changes.
inline constexpr std::string_view kStreamScheme = "splitmix64-ctr/v1";

namespace detail {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace detail

// Counter-based random stream. The n-th output is a pure function of
// (master_seed, trial_index, n), so any trial can be regenerated in isolation
// and trials can be farmed out to threads in any order.
class TrialStream {
public:
    using result_type = std::uint64_t;

    constexpr TrialStream(std::uint64_t master_seed, std::uint64_t trial_index) noexcept
        : key_(detail::splitmix64_mix(
              master_seed ^ detail::splitmix64_mix(trial_index + detail::kGolden))) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        ++counter_;
        return detail::splitmix64_mix(key_ + counter_ * detail::kGolden);
    }

    // Uniform on [0, 1) with 53 random bits.
    constexpr double uniform01() noexcept {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    constexpr std::uint64_t draws() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

template <class R>
concept UniformSource = requires(R& r) {
    { r.uniform01() } -> std::convertible_to<double>;
};

} // namespace percq
