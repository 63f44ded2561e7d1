#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "carleson/triple_sum.hpp"

namespace carleson {

struct TheoremCheckConfig {
    // any of: segment, circle, lipschitz-0.5, lipschitz-1, lipschitz-2, bpli, cantor
    std::vector<std::string> sets = {"segment", "circle",  "lipschitz-0.5", "lipschitz-1",
                                     "lipschitz-2", "bpli", "cantor"};
    std::vector<int> sizes = {256, 512, 1024, 2048};  // curve families
    int cantor_gen_lo = 2;
    int cantor_gen_hi = 5;
    std::uint64_t seed = 1;
    int scales = 0;  // 0 = auto per set
    int shift_index = 1;
    int p1 = 3;
    EstimatorConfig estimator;
    int exact_up_to = 512;  // sizes up to this are always summed exactly
    double bounded_spread = 1.5;     // bounded iff max/min ratio stays under this
    double growth_slope_factor = 0.1;  // growing iff slope > factor * first value
};

struct SetClassification {
    std::string name;
    std::vector<int> sizes;           // n, or generation for the Cantor ladder
    std::vector<double> ratios;       // normalized Carleson totals at the root
    std::vector<double> sup_ratios;   // sup over all subtree roots Q0
    std::string classification;       // "bounded" or "growing"
    double spread = 0.0;              // max/min of ratios
    double slope = 0.0;               // least-squares slope of ratio vs index
    nlohmann::json to_json() const;
};

struct TheoremSummary {
    std::vector<SetClassification> sets;
    nlohmann::json to_json() const;
};

// Builds each named set across its size ladder, computes normalized Carleson
// totals over the cube tree (root ratio plus the sup over every subtree
// root), and classifies the trend across sizes.
TheoremSummary theorem_check(const TheoremCheckConfig& config);

// Normalized subtree ratio for every cube from one pass of per-cube values.
// Returned in cube index order.
std::vector<double> subtree_ratios(const std::vector<double>& per_cube_beta,
                                   const struct Filtration& filtration);

// Scale count so the finest nominal length roughly matches the typical point
// spacing.
int auto_scale_count(const MetricMeasureSpace& space);

}  // namespace carleson
