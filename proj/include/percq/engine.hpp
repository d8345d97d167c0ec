#pragma once

// Deterministic parallel trial runner.
//
// Trials are grouped into fixed-size blocks. Each block is reduced serially
// into its own accumulator and the blocks are merged in index order, so the
// result depends only on (master_seed, trials), never on the thread count or
// on scheduling.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "percq/rng.hpp"

namespace percq {

inline constexpr std::uint64_t kTrialBlock = 4096;

struct RunOptions {
    std::uint64_t master_seed = 0;
    unsigned threads = 0; // 0: hardware concurrency
};

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// MakeWorker: () -> Worker, called once per thread so each worker owns its
// scratch space. Worker: (trial_index, TrialStream&, Acc&) -> void.
// Acc must be default-constructible and provide merge(const Acc&).
template <class Acc, class MakeWorker>
Acc run_trials(std::uint64_t trials, const RunOptions& opts, MakeWorker make_worker) {
    const std::uint64_t n_blocks = (trials + kTrialBlock - 1) / kTrialBlock;
    std::vector<Acc> partial(n_blocks);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;

    auto body = [&] {
        try {
            auto worker = make_worker();
            for (std::uint64_t b = next++; b < n_blocks; b = next++) {
                const std::uint64_t lo = b * kTrialBlock;
                const std::uint64_t hi = std::min(trials, lo + kTrialBlock);
                Acc& acc = partial[b];
                for (std::uint64_t t = lo; t < hi; ++t) {
                    TrialStream rng(opts.master_seed, t);
                    worker(t, rng, acc);
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
            next = n_blocks;
        }
    };

    const unsigned n_threads =
        static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(opts.threads), std::max<std::uint64_t>(n_blocks, 1)));
    if (n_threads <= 1) {
        body();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(body);
    }
    if (failure) std::rethrow_exception(failure);

    Acc total{};
    for (const Acc& a : partial) total.merge(a);
    return total;
}

} // namespace percq
