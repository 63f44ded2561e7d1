#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace carleson {

enum class MetricKind { euclidean, explicit_matrix, snowflake };

struct RegularitySample {
    int point;
    double radius;
    double ratio;  // mass(Ball(point, radius)) / radius
};

struct RegularityReport {
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    std::vector<RegularitySample> samples;
};

/// Finite metric measure space: points with positive per-point mass and a
/// distance oracle. Masses are in length units (arclength-style densities),
/// so discrete sums track the continuous integrals they stand in for.
/// Immutable after construction; safe for concurrent reads.
class MetricMeasureSpace {
public:
    static MetricMeasureSpace euclidean(std::vector<double> coords, int dim,
                                        std::vector<double> weights);
    // row-major n x n symmetric matrix, zero diagonal; triangle inequality is
    // checked exhaustively for n <= 500 and on 1e5 sampled triples otherwise.
    static MetricMeasureSpace from_matrix(std::vector<double> matrix, int n,
                                          std::vector<double> weights);
    // d_new = d_base^exponent, exponent in (0, 1]
    static MetricMeasureSpace snowflake(const MetricMeasureSpace& base, double exponent);

    int size() const { return n_; }
    int dim() const { return dim_; }
    MetricKind kind() const { return kind_; }
    double snowflake_exponent() const { return exponent_; }
    double weight(int i) const { return weights_[check_index(i)]; }
    const std::vector<double>& weights() const { return weights_; }
    double total_mass() const { return total_mass_; }
    double diameter() const { return diameter_; }
    std::span<const double> coords_of(int i) const {
        check_index(i);
        return {coords_.data() + static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_)};
    }

    double distance(int i, int j) const;

    // Triangle excess of an unordered triple: min over the choice of middle
    // point m of d(a,m) + d(m,b) - d(a,b). Zero exactly on triples lying in
    // order along a geodesic; repeated points give zero.
    double excess_delta(int i, int j, int k) const;

    // closed ball, always contains the center
    std::vector<int> ball(int center, double radius) const;

    double set_mass(std::span<const int> subset) const;

    double dist_to_set(int i, std::span<const int> subset) const;

    // Samples (x, r) with r log-uniform in [r_min, r_max] and records
    // mass(Ball(x, r)) / r. Deterministic given seed.
    RegularityReport check_ahlfors_regularity(double r_min, double r_max,
                                              int sample_budget, std::uint64_t seed) const;

    // Coordinates (or matrix entries) and weights both scaled by lambda;
    // masses are lengths, so they scale with the metric.
    MetricMeasureSpace scaled(double lambda) const;

private:
    MetricMeasureSpace() = default;
    void finalize();  // distinct-point check + diameter + total mass
    int check_index(int i) const {
        if (i < 0 || i >= n_) throw std::out_of_range("point index " + std::to_string(i));
        return i;
    }
    double base_distance(int i, int j) const;

    MetricKind kind_ = MetricKind::euclidean;
    int n_ = 0;
    int dim_ = 0;
    double exponent_ = 1.0;  // snowflake only
    std::vector<double> coords_;   // n*dim, row-major (euclidean/snowflake-over-euclidean)
    std::vector<double> matrix_;   // n*n (explicit_matrix/snowflake-over-matrix)
    std::vector<double> weights_;
    double diameter_ = 0.0;
    double total_mass_ = 0.0;
};

}  // namespace carleson
