#include "carleson/triple_sum.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "carleson/kahan.hpp"
#include "carleson/rng.hpp"

namespace carleson {

namespace {

// Pairwise-distance cache pays off once every pair is touched ~m times;
// guard the allocation for very large sets.
constexpr std::size_t kMaxCachedPairs = 64ull * 1024 * 1024;

double delta_from_pairs(double dij, double djk, double dik) {
    const double mid_j = dij + djk - dik;
    const double mid_i = dij + dik - djk;
    const double mid_k = dik + djk - dij;
    return std::max(0.0, std::min({mid_i, mid_j, mid_k}));
}

TripleSumEstimate exact_sum(const MetricMeasureSpace& space, std::span<const int> idx) {
    const std::size_t m = idx.size();
    TripleSumEstimate est;
    est.exact = true;
    if (m < 3) return est;

    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) w[i] = space.weight(idx[i]);

    KahanSum sum;
    if (m * m <= kMaxCachedPairs) {
        std::vector<double> dist(m * m, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                double d = space.distance(idx[i], idx[j]);
                dist[i * m + j] = d;
                dist[j * m + i] = d;
            }
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                const double dij = dist[i * m + j];
                const double wij = w[i] * w[j];
                const double* di = dist.data() + i * m;
                const double* dj = dist.data() + j * m;
                for (std::size_t k = j + 1; k < m; ++k)
                    sum.add(delta_from_pairs(dij, dj[k], di[k]) * wij * w[k]);
            }
    } else {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                const double dij = space.distance(idx[i], idx[j]);
                const double wij = w[i] * w[j];
                for (std::size_t k = j + 1; k < m; ++k)
                    sum.add(delta_from_pairs(dij, space.distance(idx[j], idx[k]),
                                             space.distance(idx[i], idx[k])) *
                            wij * w[k]);
            }
    }
    // each distinct unordered triple appears 6 times among ordered ones;
    // triples with a repeated point have zero excess
    est.value = 6.0 * sum.value();
    return est;
}

TripleSumEstimate mc_sum(const MetricMeasureSpace& space, std::span<const int> idx,
                         const EstimatorConfig& config, std::uint64_t stream_tag) {
    const std::size_t m = idx.size();
    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) w[i] = space.weight(idx[i]);
    double mass = 0.0;
    {
        KahanSum s;
        for (double v : w) s.add(v);
        mass = s.value();
    }
    AliasTable table(w);
    Rng rng = substream(config.seed, "triple-mc", stream_tag);

    const int repeats = std::max(1, config.repeats);
    const std::int64_t per_repeat = config.mc_samples;
    std::vector<double> repeat_means(repeats, 0.0);
    KahanSum grand;
    KahanSum grand_sq;
    for (int r = 0; r < repeats; ++r) {
        KahanSum mean;
        for (std::int64_t t = 0; t < per_repeat; ++t) {
            int a = idx[table.sample(rng)];
            int b = idx[table.sample(rng)];
            int c = idx[table.sample(rng)];
            double d = space.excess_delta(a, b, c);
            mean.add(d);
            grand.add(d);
            grand_sq.add(d * d);
        }
        repeat_means[r] = mean.value() / static_cast<double>(per_repeat);
    }
    const double total_samples = static_cast<double>(per_repeat) * repeats;
    const double mean_delta = grand.value() / total_samples;
    const double scale = mass * mass * mass;

    TripleSumEstimate est;
    est.exact = false;
    est.samples = static_cast<std::int64_t>(total_samples);
    est.value = scale * mean_delta;
    if (repeats >= 2) {
        KahanSum var;
        for (double rm : repeat_means) var.add((rm - mean_delta) * (rm - mean_delta));
        est.stderr_ = scale * std::sqrt(var.value() / (repeats * (repeats - 1.0)));
    } else {
        double var = grand_sq.value() / total_samples - mean_delta * mean_delta;
        var = std::max(0.0, var);
        est.stderr_ = scale * std::sqrt(var / total_samples);
    }
    return est;
}

}  // namespace

void EstimatorConfig::validate() const {
    if (exact_cutoff < 1) throw std::invalid_argument("exact_cutoff must be >= 1");
    if (mc_samples < 1) throw std::invalid_argument("mc_samples must be >= 1");
    if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
}

TripleSumEstimate triple_delta_sum(const MetricMeasureSpace& space, std::span<const int> indices,
                                   const EstimatorConfig& config, std::uint64_t stream_tag) {
    config.validate();
    if (indices.size() < 3) return TripleSumEstimate{};  // only degenerate triples
    if (static_cast<std::int64_t>(indices.size()) <= config.exact_cutoff)
        return exact_sum(space, indices);
    return mc_sum(space, indices, config, stream_tag);
}

}  // namespace carleson
