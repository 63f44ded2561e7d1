#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carleson/nets.hpp"

namespace carleson {

struct Cube {
    std::string id;  // "k:<scale>:<center index>"
    int scale = 0;
    int center = -1;
    std::vector<int> members;  // sorted point indices
    int parent = -1;           // index into Filtration::cubes, -1 for root
    std::vector<int> children;
    double nominal_diam = 0.0;  // s_k; used for every normalization
    double actual_diam = 0.0;   // max pairwise member distance, diagnostics only
    double mass = 0.0;
};

/// One dyadic cube tree. Every scale partitions the full point set, children
/// refine parents, and each cube hangs off the scale-k cube containing its
/// center net point.
struct Filtration {
    int shift_index = 1;
    int p1 = 3;
    int k_min = 0;
    int k_max = 0;
    std::vector<Cube> cubes;                 // ordered by (scale, insertion)
    std::vector<std::vector<int>> by_scale;  // scale offset by k_min -> cube indices
    int root = 0;
    std::vector<int> leaf_of_point;  // point -> finest-scale cube index

    const std::vector<int>& cubes_at(int k) const { return by_scale[k - k_min]; }
    int find_cube(const std::string& id) const;  // -1 if absent
    // cube indices of the chain from the leaf of x up to the root
    std::vector<int> chain_of_point(int x) const;
};

// Builds the shift-th filtration over the hierarchy's nets. Membership is
// assigned top-down inside each parent cube: child centers (the finer net
// points among the parent's members) claim points within 0.7 * s_{k+1} in a
// shift-dependent priority order, and unclaimed points fall to the nearest
// child center. Shifts share nets and scales and differ only in assignments.
Filtration build_filtration(const MetricMeasureSpace& space, const NetHierarchy& hierarchy,
                            int shift_index, int p1 = 3);

struct FiltrationViolation {
    std::string cube_id;
    std::string invariant;
    double measured = 0.0;
    std::string detail;
};

// Empty result iff the partition/nesting/containment invariants hold:
// inner c0 = 1/8, outer C0 = 4, actual_diam <= 2*C0*s_k, exact partitioning
// per scale, tree structure, and mass telescoping (1e-12 relative).
std::vector<FiltrationViolation> validate_filtration(const MetricMeasureSpace& space,
                                                     const Filtration& filtration);

// All cubes whose member set lies inside Ball(x, 2r); the result is downward
// closed in the tree.
std::vector<int> cubes_in_ball(const MetricMeasureSpace& space, const Filtration& filtration,
                               int x, double r);

}  // namespace carleson
