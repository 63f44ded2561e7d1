#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "carleson/cubes.hpp"

namespace carleson {

struct JnsNode {
    std::string id;
    int parent = -1;
    std::vector<int> children;
    double mass = 0.0;
    int scale = 0;
};

/// Cube tree reduced to what the packing lemma needs: masses and structure.
/// Mass atoms are the leaf columns; every point of a leaf shares one chain,
/// so leaf granularity loses nothing.
struct JnsTree {
    std::vector<JnsNode> nodes;
    int root = 0;
    std::vector<int> leaves;         // node indices, deterministic order
    std::vector<int> leaf_of_point;  // column index per point (identity for JSON trees)

    static JnsTree from_filtration(const Filtration& filtration);
    static JnsTree from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    int depth_below(int node) const;
};

struct JNSInstance {
    JnsTree tree;
    std::vector<double> alpha;  // per node, nonnegative
    double threshold = 1.0;     // N
    double eta = 0.5;           // required good-mass fraction, in (0, 1]

    void validate() const;
    static JNSInstance from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

// Sum of alpha over the chain of cubes containing point x, from q0 down to
// x's leaf (both ends included).
double vertical_sum(const JNSInstance& inst, int x, int q0);

struct HypothesisCheck {
    double good_mass_fraction = 0.0;
    bool holds = false;
};

// Fraction of q0's mass whose vertical sum stays <= N; holds iff >= eta.
HypothesisCheck check_hypothesis(const JNSInstance& inst, int q0);

// Sum over cubes Q inside q0 (inclusive) of alpha(Q) * mass(Q).
double packing_sum(const JNSInstance& inst, int q0);

struct JnsReport {
    bool hypothesis_ok = false;
    std::string failing_q0;  // set when hypothesis_ok is false
    double failing_fraction = 0.0;
    double worst_ratio = 0.0;
    std::string worst_q0;
    double bound = 0.0;  // N / eta^2
    bool pass = false;

    nlohmann::json to_json() const;
};

// Checks the hypothesis at every cube first, then verifies
// packing_sum(q0) <= (N / eta^2) * mass(q0) for all q0.
JnsReport verify_jns(const JNSInstance& inst);

// Stopping-time layers from q0: layer 0 is {q0}; each next layer collects the
// maximal proper descendants at which the alpha sum measured from their
// layer-j ancestor first exceeds N.
std::vector<std::vector<int>> stopping_time_decomposition(const JNSInstance& inst, int q0);

enum class JnsStyle { uniform, sparse, adversarial };

JnsStyle jns_style_from_string(const std::string& name);

// Random alpha assignment in the given style, then a fine-to-coarse clamp
// pass that rescales subtree values wherever the good-mass fraction would
// fall below eta, so the hypothesis holds at every cube. Deterministic given
// seed.
JNSInstance generate_instance(JnsTree tree, JnsStyle style, double threshold, double eta,
                              std::uint64_t seed);

}  // namespace carleson
