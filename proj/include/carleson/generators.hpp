#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "carleson/cubes.hpp"
#include "carleson/metric_space.hpp"

namespace carleson {

// n evenly spaced points on [0,1] x {0}, weight 1/n each
MetricMeasureSpace gen_segment(int n);

// n equally spaced points on a circle of circumference 1, weight 1/n each
MetricMeasureSpace gen_circle(int n);

// Piecewise-linear graph of a random L-Lipschitz function over [0,1],
// sampled at n points by equal arclength; weight = local arclength spacing.
// The underlying function depends only on (L, seed), so refining n samples
// the same curve.
MetricMeasureSpace gen_lipschitz_graph(int n, double lipschitz_constant, std::uint64_t seed);

// Koch-type curve vertices at the given level. Each edge is replaced by four
// edges with a bump of the given angle; angle pi/3 is the classic curve.
// 4^level + 1 vertices; vertex weight is half the length of its incident
// edges.
MetricMeasureSpace gen_koch(int level, double angle);

// Centers of the generation-g four-corner (quarter-scaling) Cantor
// construction in the unit square: 4^g points, weight 4^-g each.
MetricMeasureSpace gen_four_corner_cantor(int generation);

struct BpliSet {
    MetricMeasureSpace space;
    std::vector<int> e_set;       // all point indices
    std::vector<int> etilde_set;  // the designated curve's points
    std::vector<int> labels;      // 1 = curve, 0 = fragment
};

// A Lipschitz curve carrying a theta share of the mass, padded with short
// curve fragments hovering near it. The continuous layout depends only on
// (theta, seed); n controls sampling density.
BpliSet gen_bpli_union(double theta, int n, std::uint64_t seed);

// mass(E ∩ Etilde ∩ members(q0)) >= theta * nominal_diam(q0)
bool check_big_piece(const MetricMeasureSpace& space, std::span<const int> e_set,
                     std::span<const int> etilde_set, const Cube& q0, double theta);

}  // namespace carleson
