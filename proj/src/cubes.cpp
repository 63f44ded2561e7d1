#include "carleson/cubes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "carleson/kahan.hpp"
#include "carleson/rng.hpp"

namespace carleson {

namespace {

// Claim radius as a fraction of s_k. Below 7/8, so a point within s_k/8 of a
// net point can never be claimed by a different one (separation is > s_k);
// above 1/2, so claims cover the gaps between net points on dense sets.
constexpr double kClaimRatio = 0.7;

constexpr double kInnerRatio = 0.125;  // c0 = 1/8
constexpr double kOuterRatio = 4.0;    // C0

std::string cube_id(int scale, int center) {
    return "k:" + std::to_string(scale) + ":" + std::to_string(center);
}

}  // namespace

int Filtration::find_cube(const std::string& id) const {
    for (std::size_t i = 0; i < cubes.size(); ++i)
        if (cubes[i].id == id) return static_cast<int>(i);
    return -1;
}

std::vector<int> Filtration::chain_of_point(int x) const {
    std::vector<int> chain;
    int c = leaf_of_point.at(x);
    while (c >= 0) {
        chain.push_back(c);
        c = cubes[c].parent;
    }
    return chain;
}

Filtration build_filtration(const MetricMeasureSpace& space, const NetHierarchy& hierarchy,
                            int shift_index, int p1) {
    if (p1 < 1) throw std::invalid_argument("filtration count must be >= 1");
    if (shift_index < 1 || shift_index > p1)
        throw std::invalid_argument("shift index must lie in [1, p1]");
    if (hierarchy.net_at(hierarchy.k_min).size() != 1)
        throw std::invalid_argument(
            "coarsest net must be a single point (build nets from k_min = 0)");

    const int n = space.size();
    Filtration f;
    f.shift_index = shift_index;
    f.p1 = p1;
    f.k_min = hierarchy.k_min;
    f.k_max = hierarchy.k_max;

    auto finish_cube = [&](Cube& q) {
        std::sort(q.members.begin(), q.members.end());
        KahanSum mass;
        double diam = 0.0;
        for (std::size_t a = 0; a < q.members.size(); ++a) {
            mass.add(space.weight(q.members[a]));
            for (std::size_t b = a + 1; b < q.members.size(); ++b)
                diam = std::max(diam, space.distance(q.members[a], q.members[b]));
        }
        q.mass = mass.value();
        q.actual_diam = diam;
    };

    // root: the single coarsest-scale cube holds everything
    {
        Cube root;
        root.scale = f.k_min;
        root.center = hierarchy.net_at(f.k_min).front();
        root.id = cube_id(root.scale, root.center);
        root.nominal_diam = hierarchy.scale_length(f.k_min);
        root.members.resize(n);
        for (int i = 0; i < n; ++i) root.members[i] = i;
        finish_cube(root);
        f.cubes.push_back(std::move(root));
        f.by_scale.push_back({0});
    }

    // scale at which each point first becomes a net point (-1 if never)
    std::vector<int> entry_scale(n, -1);
    for (int k = f.k_min; k <= f.k_max; ++k)
        for (int p : hierarchy.net_at(k))
            if (entry_scale[p] < 0) entry_scale[p] = k;

    // inner ball of each future cube center, reused by the repair sweep
    std::vector<std::vector<int>> inner_ball_of(n);
    for (int x : hierarchy.net_at(f.k_max)) {
        const double radius = kInnerRatio * hierarchy.scale_length(entry_scale[x]);
        for (int p = 0; p < n; ++p)
            if (space.distance(x, p) <= radius) inner_ball_of[x].push_back(p);
    }

    std::vector<int> point_cube(n, 0);  // current scale's cube index per point
    for (int k = f.k_min; k < f.k_max; ++k) {
        const int child_scale = k + 1;
        const double s_child = hierarchy.scale_length(child_scale);
        const std::vector<int>& child_net = hierarchy.net_at(child_scale);

        // Shift-dependent claim priority. Ranks hash each center's distances
        // to the three earliest net points, quantized at s/8: intrinsic, so
        // isometries and rescalings keep the tree; shift-salted, so the
        // filtrations differ; and stable under refinement of the same set,
        // unlike a permutation keyed to the net size.
        std::vector<int> priority_rank(n, -1);
        std::vector<std::uint64_t> priority_hash(n, 0);
        {
            const std::uint64_t salt = derive_seed(hierarchy.seed, "claim-priority",
                                                   static_cast<std::uint64_t>(shift_index),
                                                   static_cast<std::uint64_t>(child_scale));
            const double quantum = s_child / 8.0;
            const std::vector<int>& finest = hierarchy.net_at(f.k_max);
            const int anchor_count = std::min<int>(3, static_cast<int>(finest.size()));
            for (std::size_t r = 0; r < child_net.size(); ++r) {
                const int c = child_net[r];
                std::uint64_t h = salt;
                for (int a = 0; a < anchor_count; ++a) {
                    auto cell = static_cast<std::uint64_t>(
                        std::floor(space.distance(c, finest[a]) / quantum));
                    std::uint64_t state = cell + 0x632be59bd9b4e019ULL * (a + 1);
                    h ^= splitmix64(state) + (h << 6) + (h >> 2);
                }
                priority_hash[c] = h;
                priority_rank[c] = static_cast<int>(r);  // tie-break by insertion
            }
        }
        auto higher_priority = [&](int a, int b) {
            if (priority_hash[a] != priority_hash[b]) return priority_hash[a] < priority_hash[b];
            return priority_rank[a] < priority_rank[b];
        };

        const double claim_radius = kClaimRatio * s_child;

        // assignment state for this scale; member lists come afterwards so
        // repairs work on one structure
        std::vector<int> cube_of_point(n, -1);
        std::vector<int> cube_center;
        std::vector<int> cube_parent;

        for (int parent_idx : f.by_scale.back()) {
            Cube& parent = f.cubes[parent_idx];
            // candidate child centers: finer net points among the parent's members
            std::vector<int> centers;
            for (int p : parent.members)
                if (priority_rank[p] >= 0) centers.push_back(p);
            std::sort(centers.begin(), centers.end(), higher_priority);

            std::vector<int> cube_of_center(centers.size());
            for (std::size_t c = 0; c < centers.size(); ++c) {
                cube_of_center[c] = static_cast<int>(cube_center.size());
                cube_center.push_back(centers[c]);
                cube_parent.push_back(parent_idx);
            }

            // Claims in priority order settle points near a center. A point
            // whose claim (or nearest center) is distant while a neighbor
            // sits much closer defers to the growth pass below; cutting a
            // tight cluster apart here strands its tail with a center whose
            // scale keeps shrinking.
            std::vector<int> deferred;
            for (int p : parent.members) {
                int claimed_by = -1;
                double claim_d = 0.0;
                int nearest = -1;
                double nearest_d = std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < centers.size(); ++c) {
                    double d = space.distance(p, centers[c]);
                    if (claimed_by < 0 && d <= claim_radius) {
                        claimed_by = static_cast<int>(c);
                        claim_d = d;
                    }
                    if (d < nearest_d) {
                        nearest_d = d;
                        nearest = static_cast<int>(c);
                    }
                }
                double neighbor_d = std::numeric_limits<double>::infinity();
                for (int q : parent.members)
                    if (q != p) neighbor_d = std::min(neighbor_d, space.distance(p, q));

                if (claimed_by >= 0 &&
                    (claim_d < 0.3 * s_child || 3.0 * neighbor_d >= claim_d))
                    cube_of_point[p] = cube_of_center[claimed_by];
                else if (claimed_by < 0 && nearest_d <= 1.5 * s_child &&
                         3.0 * neighbor_d >= nearest_d)
                    cube_of_point[p] = cube_of_center[nearest];
                else
                    deferred.push_back(p);
            }
            // growth pass: deferred points join the cube of their closest
            // assigned neighbor, globally closest first, so isolated clusters
            // attach as a unit wherever they touch assigned mass
            if (!deferred.empty()) {
                std::vector<double> best_d(deferred.size(),
                                           std::numeric_limits<double>::infinity());
                std::vector<int> best_target(deferred.size(), -1);
                auto relax = [&](std::size_t di, int q) {
                    double d = space.distance(deferred[di], q);
                    if (d < best_d[di]) {
                        best_d[di] = d;
                        best_target[di] = cube_of_point[q];
                    }
                };
                for (std::size_t di = 0; di < deferred.size(); ++di)
                    for (int q : parent.members)
                        if (cube_of_point[q] >= 0) relax(di, q);
                std::vector<char> done(deferred.size(), 0);
                for (std::size_t round = 0; round < deferred.size(); ++round) {
                    std::size_t pick = deferred.size();
                    for (std::size_t di = 0; di < deferred.size(); ++di)
                        if (!done[di] && (pick == deferred.size() || best_d[di] < best_d[pick]))
                            pick = di;
                    done[pick] = 1;
                    cube_of_point[deferred[pick]] = best_target[pick];
                    for (std::size_t di = 0; di < deferred.size(); ++di)
                        if (!done[di]) relax(di, deferred[pick]);
                }
            }
        }

        // Repair sweep: the inner ball of every finer net point must sit in a
        // single cube of this scale. Overlapping balls are merged first and
        // each cluster moves as a unit into the cube of its coarsest anchor,
        // so no protected ball is torn by another ball's move. Earlier scales
        // were repaired the same way, which keeps every cluster inside one
        // parent and the moves nesting-safe.
        {
            std::vector<int> find_root(n);
            for (int p = 0; p < n; ++p) find_root[p] = p;
            std::function<int(int)> root = [&](int p) {
                while (find_root[p] != p) p = find_root[p] = find_root[find_root[p]];
                return p;
            };
            for (int x : hierarchy.net_at(f.k_max)) {
                if (entry_scale[x] <= child_scale) continue;
                for (int p : inner_ball_of[x]) find_root[root(p)] = root(x);
            }
            // anchor: protected net point with the coarsest entry, lowest
            // index on ties
            std::vector<int> anchor(n, -1);
            for (int x : hierarchy.net_at(f.k_max)) {
                if (entry_scale[x] <= child_scale) continue;
                int r = root(x);
                if (anchor[r] < 0 || entry_scale[x] < entry_scale[anchor[r]] ||
                    (entry_scale[x] == entry_scale[anchor[r]] && x < anchor[r]))
                    anchor[r] = x;
            }
            for (int p = 0; p < n; ++p) {
                int a = anchor[root(p)];
                if (a < 0) continue;
                const int target = cube_of_point[a];
                if (cube_of_point[p] == target) continue;
                if (cube_parent[cube_of_point[p]] != cube_parent[target]) continue;
                cube_of_point[p] = target;
            }
        }

        // materialize the scale's cubes; scanning points in index order keeps
        // member lists sorted
        std::vector<std::vector<int>> members_of(cube_center.size());
        for (int p = 0; p < n; ++p) members_of[cube_of_point[p]].push_back(p);

        std::vector<int> scale_indices;
        std::vector<int> global_index(cube_center.size(), -1);
        for (std::size_t c = 0; c < cube_center.size(); ++c) {
            if (members_of[c].empty()) continue;  // cannot happen: centers keep themselves
            Cube q;
            q.scale = child_scale;
            q.center = cube_center[c];
            q.id = cube_id(child_scale, q.center);
            q.nominal_diam = s_child;
            q.parent = cube_parent[c];
            q.members = std::move(members_of[c]);
            finish_cube(q);
            int idx = static_cast<int>(f.cubes.size());
            global_index[c] = idx;
            f.cubes[q.parent].children.push_back(idx);
            f.cubes.push_back(std::move(q));
            scale_indices.push_back(idx);
        }
        f.by_scale.push_back(std::move(scale_indices));
        for (int p = 0; p < n; ++p) point_cube[p] = global_index[cube_of_point[p]];
    }

    f.leaf_of_point = std::move(point_cube);
    return f;
}

std::vector<FiltrationViolation> validate_filtration(const MetricMeasureSpace& space,
                                                     const Filtration& f) {
    std::vector<FiltrationViolation> out;
    const int n = space.size();
    auto report = [&](const std::string& id, const std::string& inv, double measured,
                      const std::string& detail) {
        out.push_back({id, inv, measured, detail});
    };

    if (f.cubes.empty()) {
        report("", "structure", 0, "no cubes");
        return out;
    }
    const Cube& root = f.cubes[f.root];
    if (static_cast<int>(root.members.size()) != n)
        report(root.id, "structure", static_cast<double>(root.members.size()),
               "root does not contain every point");
    if (root.parent != -1) report(root.id, "structure", 0, "root has a parent");

    for (std::size_t i = 0; i < f.cubes.size(); ++i) {
        const Cube& q = f.cubes[i];
        if (static_cast<int>(i) != f.root) {
            if (q.parent < 0 || q.parent >= static_cast<int>(f.cubes.size())) {
                report(q.id, "structure", static_cast<double>(q.parent), "orphan cube");
                continue;
            }
            const Cube& p = f.cubes[q.parent];
            if (q.scale != p.scale + 1)
                report(q.id, "structure", q.scale, "child scale is not parent scale + 1");
            bool listed = std::find(p.children.begin(), p.children.end(), static_cast<int>(i)) !=
                          p.children.end();
            if (!listed) report(q.id, "structure", 0, "not listed among parent's children");
            // child members inside parent members
            if (!std::includes(p.members.begin(), p.members.end(), q.members.begin(),
                               q.members.end()))
                report(q.id, "nesting", 0, "members not contained in parent");
        }
        if (q.members.empty()) report(q.id, "structure", 0, "empty cube");

        const double s_k = q.nominal_diam;
        // outer containment and recorded diameter
        double max_center_dist = 0.0;
        for (int m : q.members)
            max_center_dist = std::max(max_center_dist, space.distance(q.center, m));
        if (max_center_dist > kOuterRatio * s_k * (1.0 + 1e-12))
            report(q.id, "outer-containment", max_center_dist,
                   "member farther than C0*s_k from center");
        if (q.actual_diam > 2.0 * kOuterRatio * s_k * (1.0 + 1e-12))
            report(q.id, "diameter", q.actual_diam, "actual diameter exceeds 2*C0*s_k");

        // inner containment: every point within c0*s_k of the center belongs here
        const double inner = kInnerRatio * s_k;
        for (int p = 0; p < n; ++p) {
            if (space.distance(q.center, p) <= inner &&
                !std::binary_search(q.members.begin(), q.members.end(), p))
                report(q.id, "inner-containment", space.distance(q.center, p),
                       "point " + std::to_string(p) + " within c0*s_k but not a member");
        }

        // mass telescoping
        if (!q.children.empty()) {
            KahanSum child_mass;
            std::size_t child_members = 0;
            for (int c : q.children) {
                child_mass.add(f.cubes[c].mass);
                child_members += f.cubes[c].members.size();
            }
            if (std::abs(child_mass.value() - q.mass) > 1e-12 * std::max(1.0, std::abs(q.mass)))
                report(q.id, "mass-telescoping", child_mass.value() - q.mass,
                       "children masses do not sum to parent mass");
            if (child_members != q.members.size())
                report(q.id, "partition", static_cast<double>(child_members),
                       "children member counts do not sum to parent count");
        }
    }

    // each scale partitions the point set
    for (int k = f.k_min; k <= f.k_max; ++k) {
        std::vector<int> owner(n, -1);
        for (int ci : f.cubes_at(k)) {
            for (int m : f.cubes[ci].members) {
                if (owner[m] != -1)
                    report(f.cubes[ci].id, "partition", k,
                           "point " + std::to_string(m) + " in two scale-" + std::to_string(k) +
                               " cubes");
                owner[m] = ci;
            }
        }
        for (int p = 0; p < n; ++p)
            if (owner[p] == -1)
                report("k:" + std::to_string(k), "partition", k,
                       "point " + std::to_string(p) + " uncovered at scale " + std::to_string(k));
    }
    return out;
}

std::vector<int> cubes_in_ball(const MetricMeasureSpace& space, const Filtration& f, int x,
                               double r) {
    if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
    std::vector<char> inside(space.size(), 0);
    for (int j = 0; j < space.size(); ++j)
        if (space.distance(x, j) <= 2.0 * r) inside[j] = 1;

    std::vector<int> result;
    // walk top-down: once a cube is inside, its whole subtree is inside
    std::vector<int> stack = {f.root};
    std::vector<int> contained_stack;
    while (!stack.empty()) {
        int idx = stack.back();
        stack.pop_back();
        const Cube& q = f.cubes[idx];
        bool ok = true;
        for (int m : q.members) {
            if (!inside[m]) {
                ok = false;
                break;
            }
        }
        if (ok) {
            contained_stack.push_back(idx);
            continue;
        }
        for (int c : q.children) stack.push_back(c);
    }
    // expand contained subtrees
    for (int idx : contained_stack) {
        std::vector<int> sub = {idx};
        while (!sub.empty()) {
            int i = sub.back();
            sub.pop_back();
            result.push_back(i);
            for (int c : f.cubes[i].children) sub.push_back(c);
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

}  // namespace carleson
