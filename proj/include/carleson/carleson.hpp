#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "carleson/cubes.hpp"
#include "carleson/triple_sum.hpp"

namespace carleson {

struct PerCubeBeta {
    std::string id;
    int scale = 0;
    double beta3 = 0.0;
    bool exact = true;
    double stderr_ = 0.0;
};

struct PerScaleRow {
    int scale = 0;
    std::int64_t count = 0;
    double sum = 0.0;
    double normalized = 0.0;
};

/// Multiscale flatness report: per-cube (or per-ball) beta3 values, per-scale
/// aggregates, the grand total, and the total normalized by the domain size.
struct CarlesonReport {
    std::string form;  // "cubes" or "balls"
    std::vector<PerCubeBeta> per_cube;
    std::vector<PerScaleRow> per_scale;
    double total = 0.0;
    double normalizer = 0.0;  // diam(Q0) for cubes, r for balls
    double ratio = 0.0;       // total / normalizer
    double total_stderr = 0.0;
    EstimatorConfig config;

    nlohmann::json to_json() const;
    void write_scales_csv(const std::string& path) const;
};

// beta3 of one cube: nominal_diam^-3 times the ordered-triple excess sum over
// the cube's members.
TripleSumEstimate beta3_cube_estimate(const MetricMeasureSpace& space, const Cube& cube,
                                      const EstimatorConfig& config);
double beta3_cube(const MetricMeasureSpace& space, const Cube& cube,
                  const EstimatorConfig& config);

// Same sum over {x in domain : dist(x, members) <= a_prime * nominal_diam},
// still normalized by nominal_diam^3. Returns zero on an empty effective
// domain.
TripleSumEstimate beta3_enlarged_estimate(const MetricMeasureSpace& space, const Cube& cube,
                                          std::span<const int> domain, double a_prime,
                                          const EstimatorConfig& config);
double beta3_enlarged(const MetricMeasureSpace& space, const Cube& cube,
                      std::span<const int> domain, double a_prime,
                      const EstimatorConfig& config);

// Sums beta3 over every cube of the subtree rooted at q0 (inclusive),
// normalized by the root cube's nominal diameter. Per-cube evaluation runs in
// parallel; reduction order is fixed, so reports are bit-stable across thread
// counts.
CarlesonReport carleson_sum_cubes(const MetricMeasureSpace& space, const Filtration& filtration,
                                  int q0, const EstimatorConfig& config);

// Ball-family form: sums diam(B)^-3 * (triple excess sum over B's members)
// over family balls whose member sets lie in Ball(x, 2r), normalized by r.
// diam(B) = 2 * radius(B).
CarlesonReport carleson_sum_balls(const MetricMeasureSpace& space, const BallFamily& family,
                                  int x, double r, const EstimatorConfig& config);

// Sum over cubes Q inside q1 that meet etilde of
// nominal_diam(Q)^-1 * sum_{x in members(Q) ∩ e_set} dist(x, etilde) * w(x).
double dist_carleson_sum(const MetricMeasureSpace& space, std::span<const int> e_set,
                         std::span<const int> etilde, const Filtration& filtration, int q1);

struct ApproxDecomposition {
    double lhs = 0.0;            // beta3 of the cube
    double dist_term = 0.0;      // diam^-1 * weighted distance of members to etilde
    double enlarged_term = 0.0;  // beta3 over the enlarged etilde domain
    double ratio = 0.0;          // lhs / (dist_term + enlarged_term); 0 when lhs = 0
};

ApproxDecomposition approx_decomposition_check(const MetricMeasureSpace& space, const Cube& cube,
                                               std::span<const int> etilde, double a_prime,
                                               const EstimatorConfig& config);

// nominal_diam^-4 weighted excess sum over the unit-enlarged domain within
// e_set; equals beta3_enlarged(..., a_prime = 1) / nominal_diam.
double alpha_of_cube(const MetricMeasureSpace& space, const Cube& cube,
                     std::span<const int> e_set,
                     const EstimatorConfig& config = EstimatorConfig::exact());

}  // namespace carleson
