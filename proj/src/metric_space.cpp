#include "carleson/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "carleson/kahan.hpp"
#include "carleson/rng.hpp"

namespace carleson {

namespace {

void check_weights(const std::vector<double>& weights) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
            throw std::invalid_argument("weight " + std::to_string(i) + " must be positive");
    }
}

}  // namespace

MetricMeasureSpace MetricMeasureSpace::euclidean(std::vector<double> coords, int dim,
                                                 std::vector<double> weights) {
    if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
    if (coords.size() != weights.size() * static_cast<std::size_t>(dim))
        throw std::invalid_argument("coords/weights size mismatch");
    check_weights(weights);
    MetricMeasureSpace s;
    s.kind_ = MetricKind::euclidean;
    s.n_ = static_cast<int>(weights.size());
    s.dim_ = dim;
    s.coords_ = std::move(coords);
    s.weights_ = std::move(weights);
    s.finalize();
    return s;
}

MetricMeasureSpace MetricMeasureSpace::from_matrix(std::vector<double> matrix, int n,
                                                   std::vector<double> weights) {
    if (n < 1) throw std::invalid_argument("matrix must have n >= 1");
    if (matrix.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("matrix size is not n*n");
    if (weights.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("weights size mismatch");
    check_weights(weights);
    auto at = [&](int i, int j) { return matrix[static_cast<std::size_t>(i) * n + j]; };
    for (int i = 0; i < n; ++i) {
        if (at(i, i) != 0.0) throw std::invalid_argument("matrix diagonal must be zero");
        for (int j = i + 1; j < n; ++j) {
            if (at(i, j) != at(j, i)) throw std::invalid_argument("matrix must be symmetric");
            if (!(at(i, j) > 0.0) || !std::isfinite(at(i, j)))
                throw std::invalid_argument("off-diagonal entries must be positive");
        }
    }
    // triangle inequality: exhaustive for small n, sampled otherwise
    auto check_triple = [&](int i, int j, int k) {
        const double slack = 1e-12 * (at(i, j) + at(j, k) + at(i, k));
        if (at(i, k) > at(i, j) + at(j, k) + slack)
            throw std::invalid_argument("triangle inequality violated at (" + std::to_string(i) +
                                        "," + std::to_string(j) + "," + std::to_string(k) + ")");
    };
    if (n <= 500) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    if (i != j && j != k && i != k) check_triple(i, j, k);
    } else {
        Rng rng = substream(0x7a11d8ull + static_cast<std::uint64_t>(n), "matrix-triangle-check");
        for (int t = 0; t < 100000; ++t) {
            int i = static_cast<int>(rng.next_below(n));
            int j = static_cast<int>(rng.next_below(n));
            int k = static_cast<int>(rng.next_below(n));
            if (i != j && j != k && i != k) check_triple(i, j, k);
        }
    }
    MetricMeasureSpace s;
    s.kind_ = MetricKind::explicit_matrix;
    s.n_ = n;
    s.dim_ = 0;
    s.matrix_ = std::move(matrix);
    s.weights_ = std::move(weights);
    s.finalize();
    return s;
}

MetricMeasureSpace MetricMeasureSpace::snowflake(const MetricMeasureSpace& base, double exponent) {
    if (!(exponent > 0.0) || exponent > 1.0)
        throw std::invalid_argument("snowflake exponent must lie in (0, 1]");
    if (base.kind_ == MetricKind::snowflake)
        throw std::invalid_argument("cannot snowflake a snowflake; compose exponents instead");
    MetricMeasureSpace s = base;
    s.kind_ = MetricKind::snowflake;
    s.exponent_ = exponent;
    s.finalize();
    return s;
}

void MetricMeasureSpace::finalize() {
    if (n_ < 1) throw std::invalid_argument("space must contain at least one point");
    KahanSum mass;
    for (double w : weights_) mass.add(w);
    total_mass_ = mass.value();
    double diam = 0.0;
    for (int i = 0; i < n_; ++i) {
        for (int j = i + 1; j < n_; ++j) {
            double d = distance(i, j);
            if (!(d > 0.0))
                throw std::invalid_argument("points " + std::to_string(i) + " and " +
                                            std::to_string(j) + " coincide; points must be distinct");
            diam = std::max(diam, d);
        }
    }
    diameter_ = diam;
}

double MetricMeasureSpace::base_distance(int i, int j) const {
    if (!matrix_.empty())
        return matrix_[static_cast<std::size_t>(i) * n_ + j];
    const double* a = coords_.data() + static_cast<std::size_t>(i) * dim_;
    const double* b = coords_.data() + static_cast<std::size_t>(j) * dim_;
    double sq = 0.0;
    for (int d = 0; d < dim_; ++d) {
        double diff = a[d] - b[d];
        sq += diff * diff;
    }
    return std::sqrt(sq);
}

double MetricMeasureSpace::distance(int i, int j) const {
    check_index(i);
    check_index(j);
    if (i == j) return 0.0;
    double d = base_distance(i, j);
    if (kind_ == MetricKind::snowflake)
        d = exponent_ == 0.5 ? std::sqrt(d) : std::pow(d, exponent_);
    return d;
}

double MetricMeasureSpace::excess_delta(int i, int j, int k) const {
    const double dij = distance(i, j);
    const double djk = distance(j, k);
    const double dik = distance(i, k);
    const double mid_j = dij + djk - dik;
    const double mid_i = dij + dik - djk;
    const double mid_k = dik + djk - dij;
    return std::max(0.0, std::min({mid_i, mid_j, mid_k}));
}

std::vector<int> MetricMeasureSpace::ball(int center, double radius) const {
    check_index(center);
    if (radius < 0.0) throw std::invalid_argument("radius must be >= 0");
    std::vector<int> out;
    for (int j = 0; j < n_; ++j)
        if (distance(center, j) <= radius) out.push_back(j);
    return out;
}

double MetricMeasureSpace::set_mass(std::span<const int> subset) const {
    KahanSum sum;
    for (int i : subset) sum.add(weight(i));
    return sum.value();
}

double MetricMeasureSpace::dist_to_set(int i, std::span<const int> subset) const {
    check_index(i);
    if (subset.empty()) throw std::invalid_argument("dist_to_set: empty subset");
    double best = std::numeric_limits<double>::infinity();
    for (int j : subset) best = std::min(best, distance(i, j));
    return best;
}

RegularityReport MetricMeasureSpace::check_ahlfors_regularity(double r_min, double r_max,
                                                              int sample_budget,
                                                              std::uint64_t seed) const {
    if (n_ < 2 || diameter_ <= 0.0)
        throw std::invalid_argument("regularity check requires at least two distinct points");
    if (!(r_min > 0.0) || !(r_min < r_max) || r_max > diameter_ * (1.0 + 1e-12))
        throw std::invalid_argument("need 0 < r_min < r_max <= diameter");
    if (sample_budget < 1) throw std::invalid_argument("sample budget must be >= 1");

    Rng rng = substream(seed, "ahlfors-regularity");
    RegularityReport rep;
    rep.r_min = r_min;
    rep.r_max = r_max;
    rep.ratio_min = std::numeric_limits<double>::infinity();
    rep.ratio_max = 0.0;
    rep.samples.reserve(sample_budget);
    const double log_lo = std::log(r_min);
    const double log_hi = std::log(r_max);
    for (int t = 0; t < sample_budget; ++t) {
        int x = static_cast<int>(rng.next_below(n_));
        double r = std::exp(rng.uniform(log_lo, log_hi));
        KahanSum mass;
        for (int j = 0; j < n_; ++j)
            if (distance(x, j) <= r) mass.add(weights_[j]);
        double ratio = mass.value() / r;
        rep.samples.push_back({x, r, ratio});
        rep.ratio_min = std::min(rep.ratio_min, ratio);
        rep.ratio_max = std::max(rep.ratio_max, ratio);
    }
    return rep;
}

MetricMeasureSpace MetricMeasureSpace::scaled(double lambda) const {
    if (!(lambda > 0.0)) throw std::invalid_argument("scale factor must be positive");
    if (kind_ == MetricKind::snowflake)
        throw std::invalid_argument("scaled() supports euclidean and matrix spaces");
    MetricMeasureSpace s = *this;
    for (double& c : s.coords_) c *= lambda;
    for (double& m : s.matrix_) m *= lambda;
    for (double& w : s.weights_) w *= lambda;
    s.finalize();
    return s;
}

}  // namespace carleson
