#include "carleson/jns.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "carleson/kahan.hpp"
#include "carleson/rng.hpp"

namespace carleson {

namespace {

bool is_descendant(const JnsTree& tree, int node, int ancestor) {
    std::size_t steps = 0;
    while (node >= 0 && steps++ <= tree.nodes.size()) {
        if (node == ancestor) return true;
        node = tree.nodes[node].parent;
    }
    return false;  // also trips on parent cycles
}

}  // namespace

JnsTree JnsTree::from_filtration(const Filtration& f) {
    JnsTree t;
    t.nodes.resize(f.cubes.size());
    for (std::size_t i = 0; i < f.cubes.size(); ++i) {
        const Cube& q = f.cubes[i];
        JnsNode& n = t.nodes[i];
        n.id = q.id;
        n.parent = q.parent;
        n.children = q.children;
        n.mass = q.mass;
        n.scale = q.scale;
    }
    t.root = f.root;
    for (std::size_t i = 0; i < t.nodes.size(); ++i)
        if (t.nodes[i].children.empty()) t.leaves.push_back(static_cast<int>(i));
    std::vector<int> leaf_column(t.nodes.size(), -1);
    for (std::size_t c = 0; c < t.leaves.size(); ++c) leaf_column[t.leaves[c]] = static_cast<int>(c);
    t.leaf_of_point.resize(f.leaf_of_point.size());
    for (std::size_t p = 0; p < f.leaf_of_point.size(); ++p)
        t.leaf_of_point[p] = leaf_column[f.leaf_of_point[p]];
    return t;
}

JnsTree JnsTree::from_json(const nlohmann::json& j) {
    JnsTree t;
    const auto& nodes = j.at("nodes");
    std::map<std::string, int> index_of;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        JnsNode n;
        n.id = nodes[i].at("id").get<std::string>();
        n.mass = nodes[i].at("mass").get<double>();
        n.scale = nodes[i].value("scale", 0);
        if (index_of.count(n.id)) throw std::invalid_argument("duplicate node id " + n.id);
        index_of[n.id] = static_cast<int>(i);
        t.nodes.push_back(std::move(n));
    }
    int root = -1;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& pj = nodes[i].at("parent");
        if (pj.is_null()) {
            if (root >= 0) throw std::invalid_argument("multiple roots");
            root = static_cast<int>(i);
            continue;
        }
        auto it = index_of.find(pj.get<std::string>());
        if (it == index_of.end())
            throw std::invalid_argument("unknown parent id " + pj.get<std::string>());
        t.nodes[i].parent = it->second;
        t.nodes[it->second].children.push_back(static_cast<int>(i));
    }
    if (root < 0) throw std::invalid_argument("tree has no root");
    t.root = root;
    for (std::size_t i = 0; i < t.nodes.size(); ++i)
        if (t.nodes[i].children.empty()) t.leaves.push_back(static_cast<int>(i));
    t.leaf_of_point.resize(t.leaves.size());
    for (std::size_t c = 0; c < t.leaves.size(); ++c) t.leaf_of_point[c] = static_cast<int>(c);
    // reachability from the root
    for (std::size_t i = 0; i < t.nodes.size(); ++i)
        if (!is_descendant(t, static_cast<int>(i), t.root))
            throw std::invalid_argument("node " + t.nodes[i].id + " is not reachable from the root");
    return t;
}

nlohmann::json JnsTree::to_json() const {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : this->nodes) {
        nlohmann::json nj = {{"id", n.id}, {"mass", n.mass}, {"scale", n.scale}};
        if (n.parent < 0)
            nj["parent"] = nullptr;
        else
            nj["parent"] = this->nodes[n.parent].id;
        nodes.push_back(std::move(nj));
    }
    return {{"nodes", nodes}};
}

int JnsTree::depth_below(int node) const {
    int best = 0;
    for (int c : nodes[node].children) best = std::max(best, 1 + depth_below(c));
    return best;
}

void JNSInstance::validate() const {
    if (alpha.size() != tree.nodes.size())
        throw std::invalid_argument("alpha must cover every cube of the tree");
    for (double a : alpha)
        if (!(a >= 0.0)) throw std::invalid_argument("alpha values must be nonnegative");
    if (!(threshold > 0.0)) throw std::invalid_argument("N must be positive");
    if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("eta must lie in (0, 1]");
}

JNSInstance JNSInstance::from_json(const nlohmann::json& j) {
    JNSInstance inst;
    inst.tree = JnsTree::from_json(j.at("tree"));
    inst.threshold = j.at("N").get<double>();
    inst.eta = j.at("eta").get<double>();
    inst.alpha.assign(inst.tree.nodes.size(), 0.0);
    const auto& aj = j.at("alpha");
    for (std::size_t i = 0; i < inst.tree.nodes.size(); ++i) {
        const std::string& id = inst.tree.nodes[i].id;
        if (!aj.contains(id)) throw std::invalid_argument("alpha missing for cube " + id);
        inst.alpha[i] = aj.at(id).get<double>();
    }
    inst.validate();
    return inst;
}

nlohmann::json JNSInstance::to_json() const {
    nlohmann::json aj = nlohmann::json::object();
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) aj[tree.nodes[i].id] = alpha[i];
    return {{"tree", tree.to_json()}, {"alpha", aj}, {"N", threshold}, {"eta", eta}};
}

double vertical_sum(const JNSInstance& inst, int x, int q0) {
    if (x < 0 || x >= static_cast<int>(inst.tree.leaf_of_point.size()))
        throw std::out_of_range("point index out of range");
    int node = inst.tree.leaves[inst.tree.leaf_of_point[x]];
    if (!is_descendant(inst.tree, node, q0))
        throw std::invalid_argument("point lies outside the given cube");
    double sum = 0.0;
    for (;;) {
        sum += inst.alpha[node];
        if (node == q0) break;
        node = inst.tree.nodes[node].parent;
    }
    return sum;
}

namespace {

// chain sums from q0 to every leaf below it, one DFS
void chain_sums(const JNSInstance& inst, int q0, std::vector<std::pair<int, double>>& out) {
    struct Item {
        int node;
        double sum;
    };
    std::vector<Item> stack = {{q0, 0.0}};
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        double s = it.sum + inst.alpha[it.node];
        const auto& children = inst.tree.nodes[it.node].children;
        if (children.empty()) {
            out.push_back({it.node, s});
            continue;
        }
        for (int c : children) stack.push_back({c, s});
    }
}

}  // namespace

HypothesisCheck check_hypothesis(const JNSInstance& inst, int q0) {
    const double total = inst.tree.nodes[q0].mass;
    if (!(total > 0.0)) throw std::invalid_argument("cube has no mass");
    std::vector<std::pair<int, double>> sums;
    chain_sums(inst, q0, sums);
    KahanSum good;
    for (const auto& [leaf, s] : sums)
        if (s <= inst.threshold) good.add(inst.tree.nodes[leaf].mass);
    HypothesisCheck out;
    out.good_mass_fraction = good.value() / total;
    out.holds = out.good_mass_fraction >= inst.eta - 1e-12;
    return out;
}

double packing_sum(const JNSInstance& inst, int q0) {
    KahanSum sum;
    std::vector<int> stack = {q0};
    std::vector<int> subtree;
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        subtree.push_back(i);
        for (int c : inst.tree.nodes[i].children) stack.push_back(c);
    }
    std::sort(subtree.begin(), subtree.end());
    for (int i : subtree) sum.add(inst.alpha[i] * inst.tree.nodes[i].mass);
    return sum.value();
}

nlohmann::json JnsReport::to_json() const {
    nlohmann::json j = {{"hypothesis_ok", hypothesis_ok},
                        {"worst_ratio", worst_ratio},
                        {"worst_q0", worst_q0},
                        {"bound", bound},
                        {"pass", pass}};
    if (!hypothesis_ok) {
        j["failing_q0"] = failing_q0;
        j["failing_fraction"] = failing_fraction;
    }
    return j;
}

JnsReport verify_jns(const JNSInstance& inst) {
    inst.validate();
    JnsReport report;
    report.bound = inst.threshold / (inst.eta * inst.eta);
    for (std::size_t q0 = 0; q0 < inst.tree.nodes.size(); ++q0) {
        HypothesisCheck hc = check_hypothesis(inst, static_cast<int>(q0));
        if (!hc.holds) {
            report.hypothesis_ok = false;
            report.failing_q0 = inst.tree.nodes[q0].id;
            report.failing_fraction = hc.good_mass_fraction;
            report.pass = false;
            return report;
        }
    }
    report.hypothesis_ok = true;
    double worst = 0.0;
    int worst_idx = inst.tree.root;
    for (std::size_t q0 = 0; q0 < inst.tree.nodes.size(); ++q0) {
        double ratio = packing_sum(inst, static_cast<int>(q0)) / inst.tree.nodes[q0].mass;
        if (ratio > worst) {
            worst = ratio;
            worst_idx = static_cast<int>(q0);
        }
    }
    report.worst_ratio = worst;
    report.worst_q0 = inst.tree.nodes[worst_idx].id;
    report.pass = worst <= report.bound * (1.0 + 1e-12);
    return report;
}

std::vector<std::vector<int>> stopping_time_decomposition(const JNSInstance& inst, int q0) {
    std::vector<std::vector<int>> layers;
    layers.push_back({q0});
    while (!layers.back().empty()) {
        std::vector<int> next;
        for (int top : layers.back()) {
            // maximal proper descendants whose alpha sum measured strictly
            // below `top` exceeds N
            struct Item {
                int node;
                double sum;  // alpha over (top, node], the top excluded
            };
            std::vector<Item> stack;
            for (int c : inst.tree.nodes[top].children)
                stack.push_back({c, inst.alpha[c]});
            while (!stack.empty()) {
                Item it = stack.back();
                stack.pop_back();
                if (it.sum > inst.threshold) {
                    next.push_back(it.node);
                    continue;  // maximal: do not descend further
                }
                for (int c : inst.tree.nodes[it.node].children)
                    stack.push_back({c, it.sum + inst.alpha[c]});
            }
        }
        std::sort(next.begin(), next.end());
        layers.push_back(std::move(next));
    }
    layers.pop_back();  // drop the empty terminator
    return layers;
}

JnsStyle jns_style_from_string(const std::string& name) {
    if (name == "uniform") return JnsStyle::uniform;
    if (name == "sparse") return JnsStyle::sparse;
    if (name == "adversarial") return JnsStyle::adversarial;
    throw std::invalid_argument("unknown instance style: " + name);
}

JNSInstance generate_instance(JnsTree tree, JnsStyle style, double threshold, double eta,
                              std::uint64_t seed) {
    if (!(threshold > 0.0)) throw std::invalid_argument("N must be positive");
    if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("eta must lie in (0, 1]");
    JNSInstance inst;
    inst.tree = std::move(tree);
    inst.threshold = threshold;
    inst.eta = eta;
    const std::size_t n_nodes = inst.tree.nodes.size();
    inst.alpha.assign(n_nodes, 0.0);
    Rng rng = substream(seed, "jns-instance");

    switch (style) {
        case JnsStyle::uniform: {
            // budget split along every chain keeps all vertical sums <= N
            const int depth = inst.tree.depth_below(inst.tree.root) + 1;
            for (std::size_t i = 0; i < n_nodes; ++i)
                inst.alpha[i] = rng.next_double() * threshold / depth;
            break;
        }
        case JnsStyle::sparse: {
            // support on a single scale (an antichain), values <= N
            int max_scale = 0;
            for (const auto& n : inst.tree.nodes) max_scale = std::max(max_scale, n.scale);
            int min_scale = max_scale;
            for (const auto& n : inst.tree.nodes) min_scale = std::min(min_scale, n.scale);
            int pick = min_scale + static_cast<int>(rng.next_below(
                                       static_cast<std::uint64_t>(max_scale - min_scale + 1)));
            for (std::size_t i = 0; i < n_nodes; ++i)
                if (inst.tree.nodes[i].scale == pick)
                    inst.alpha[i] = rng.next_double() * threshold;
            break;
        }
        case JnsStyle::adversarial: {
            // bad columns carry vertical sums just over N, good columns just
            // under, leaving the root's good fraction near eta
            inst.alpha[inst.tree.root] = threshold * (1.0 - 1e-9);
            double total = inst.tree.nodes[inst.tree.root].mass;
            double bad_target = (1.0 - eta - 0.02) * total;
            if (bad_target < 0.0) bad_target = 0.0;
            std::vector<int> order =
                random_permutation(static_cast<int>(inst.tree.leaves.size()), rng);
            double bad_mass = 0.0;
            for (int col : order) {
                int leaf = inst.tree.leaves[col];
                if (leaf == inst.tree.root) continue;  // single-node tree
                if (bad_mass + inst.tree.nodes[leaf].mass > bad_target) continue;
                bad_mass += inst.tree.nodes[leaf].mass;
                inst.alpha[leaf] = threshold;
            }
            break;
        }
    }

    // clamp pass, finest cubes first: wherever the good fraction falls below
    // eta, rescale the subtree so the eta-quantile of vertical sums hits N.
    // Scaling down never breaks an already-fixed cube.
    std::vector<int> by_depth(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) by_depth[i] = static_cast<int>(i);
    std::vector<int> depth(n_nodes, 0);
    for (std::size_t i = 0; i < n_nodes; ++i) depth[i] = inst.tree.depth_below(static_cast<int>(i));
    std::sort(by_depth.begin(), by_depth.end(), [&](int a, int b) { return depth[a] < depth[b]; });

    for (int q0 : by_depth) {
        std::vector<std::pair<int, double>> sums;
        chain_sums(inst, q0, sums);
        std::sort(sums.begin(), sums.end(),
                  [](const auto& a, const auto& b) { return a.second < b.second; });
        const double total = inst.tree.nodes[q0].mass;
        double acc = 0.0;
        double quantile = 0.0;
        for (const auto& [leaf, s] : sums) {
            acc += inst.tree.nodes[leaf].mass;
            quantile = s;
            if (acc >= eta * total * (1.0 - 1e-12)) break;
        }
        if (quantile > threshold) {
            const double factor = threshold / quantile;
            std::vector<int> stack = {q0};
            while (!stack.empty()) {
                int i = stack.back();
                stack.pop_back();
                inst.alpha[i] *= factor;
                for (int c : inst.tree.nodes[i].children) stack.push_back(c);
            }
        }
    }
    inst.validate();
    return inst;
}

}  // namespace carleson
