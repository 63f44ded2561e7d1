#pragma once

#include <cstdint>
#include <vector>

#include "carleson/metric_space.hpp"

namespace carleson {

/// Nested separated nets, one per dyadic scale. Scale k has nominal length
/// s_k = diameter * 2^-k; net points at scale k are pairwise > s_k apart,
/// every point lies within s_k of its assigned net point, and coarser nets
/// are prefixes of finer ones.
struct NetHierarchy {
    int k_min = 0;
    int k_max = 0;
    double base_diameter = 0.0;
    std::uint64_t seed = 0;
    // per scale, offset by k_min; net points in insertion order (coarser net
    // is always a prefix of the finer one)
    std::vector<std::vector<int>> nets;
    // per scale: point -> assigned net point (nearest, ties to the earlier
    // inserted net point)
    std::vector<std::vector<int>> assignment;

    int scale_count() const { return k_max - k_min + 1; }
    double scale_length(int k) const;
    const std::vector<int>& net_at(int k) const { return nets[k - k_min]; }
    const std::vector<int>& assignment_at(int k) const { return assignment[k - k_min]; }
};

// Greedy scan insertion per scale, coarse to fine, visiting candidates in
// index order; a candidate joins the net when it is more than s_k from every
// current net point. Reusing the coarser net as the starting list guarantees
// nesting. The seed is carried as the determinism token for the assignment
// streams built on top of the hierarchy.
NetHierarchy build_nets(const MetricMeasureSpace& space, int k_min, int k_max,
                        std::uint64_t seed);

struct BallFamilyEntry {
    int center;     // net point index
    int scale;      // k
    double radius;  // A * s_k
};

/// Multiresolution ball family: one ball per (net point, scale), radius
/// A * s_k with a single dimensionless inflation constant A.
struct BallFamily {
    double inflation = 1.0;
    std::vector<BallFamilyEntry> balls;
};

BallFamily multiresolution_balls(const NetHierarchy& hierarchy, double inflation);

}  // namespace carleson
