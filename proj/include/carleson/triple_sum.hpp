#pragma once

#include <cstdint>
#include <limits>
#include <span>

#include "carleson/metric_space.hpp"

namespace carleson {

struct EstimatorConfig {
    std::int64_t exact_cutoff = 300;   // sets up to this size are summed exactly
    std::int64_t mc_samples = 100000;  // triples per Monte Carlo estimate
    std::uint64_t seed = 0;
    int repeats = 1;  // independent repetitions; >1 gives an across-repeat stderr

    static EstimatorConfig exact() {
        EstimatorConfig c;
        c.exact_cutoff = std::numeric_limits<std::int64_t>::max();
        return c;
    }
    void validate() const;
};

struct TripleSumEstimate {
    double value = 0.0;  // ordered-triple sum of delta * w1*w2*w3
    bool exact = true;
    double stderr_ = 0.0;
    std::int64_t samples = 0;
};

// Sum of excess_delta(x1,x2,x3) * w(x1)w(x2)w(x3) over ordered index triples
// from `indices`. Exact evaluation enumerates distinct unordered triples
// (repeated points contribute zero) with compensated summation in fixed index
// order; above the cutoff, indices are drawn independently with probability
// proportional to weight and the estimate is mass^3 * mean(delta), which is
// unbiased for the product-measure sum. stream_tag keys the RNG substream so
// per-set estimates are independent and thread-order independent.
TripleSumEstimate triple_delta_sum(const MetricMeasureSpace& space, std::span<const int> indices,
                                   const EstimatorConfig& config, std::uint64_t stream_tag);

}  // namespace carleson
