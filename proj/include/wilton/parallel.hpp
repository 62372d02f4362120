#pragma once

#include <cstddef>
#include <functional>

namespace wilton {

/// Worker count from WILTON_THREADS, else hardware concurrency (at least 1).
unsigned worker_count();

/// Runs body(block) for block in [0, blocks) on worker_count() threads.
/// Blocks are claimed dynamically; callers write results into per-block
/// slots so the outcome never depends on scheduling.
void for_each_block(std::size_t blocks, const std::function<void(std::size_t)>& body);

/// Pairwise sum in fixed index order.
double pairwise_sum(const double* values, std::size_t count);

/// Running mean / second central moment, merged in a fixed tree order.
struct Moments {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) noexcept {
        count += 1.0;
        const double delta = x - mean;
        mean += delta / count;
        m2 += delta * (x - mean);
    }

    static Moments merge(const Moments& a, const Moments& b) noexcept;

    double variance() const noexcept { return count > 1.0 ? m2 / (count - 1.0) : 0.0; }
};

/// Pairwise merge of per-block moments in index order.
Moments merge_pairwise(const Moments* blocks, std::size_t count);

}  // namespace wilton
