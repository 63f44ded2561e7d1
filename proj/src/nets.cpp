#include "carleson/nets.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "carleson/rng.hpp"

namespace carleson {

double NetHierarchy::scale_length(int k) const {
    return base_diameter * std::pow(2.0, -k);
}

NetHierarchy build_nets(const MetricMeasureSpace& space, int k_min, int k_max,
                        std::uint64_t seed) {
    if (k_min > k_max) throw std::invalid_argument("k_min must be <= k_max");
    if (!(space.diameter() > 0.0)) throw std::invalid_argument("degenerate space: zero diameter");
    const int n = space.size();

    NetHierarchy h;
    h.k_min = k_min;
    h.k_max = k_max;
    h.base_diameter = space.diameter();
    h.seed = seed;

    // Scan in index order: generators emit points in spatially coherent
    // order, so refining a set leaves the coarse nets nearly in place and
    // size ladders stay comparable. The seed feeds the downstream assignment
    // streams, not the scan.
    std::vector<int> scan(n);
    for (int i = 0; i < n; ++i) scan[i] = i;

    std::vector<int> net;  // grows across scales; nesting by construction
    std::vector<char> in_net(n, 0);
    for (int k = k_min; k <= k_max; ++k) {
        const double s_k = h.scale_length(k);
        for (int p : scan) {
            if (in_net[p]) continue;
            bool separated = true;
            for (int q : net) {
                if (space.distance(p, q) <= s_k) {
                    separated = false;
                    break;
                }
            }
            if (separated) {
                net.push_back(p);
                in_net[p] = 1;
            }
        }
        h.nets.push_back(net);

        std::vector<int> assign(n, -1);
        for (int p = 0; p < n; ++p) {
            double best = std::numeric_limits<double>::infinity();
            int best_net = -1;
            for (int q : net) {  // insertion order breaks ties
                double d = space.distance(p, q);
                if (d < best) {
                    best = d;
                    best_net = q;
                }
            }
            assign[p] = best_net;
        }
        h.assignment.push_back(std::move(assign));
    }
    return h;
}

BallFamily multiresolution_balls(const NetHierarchy& hierarchy, double inflation) {
    if (!(inflation >= 1.0)) throw std::invalid_argument("inflation constant must be >= 1");
    BallFamily family;
    family.inflation = inflation;
    for (int k = hierarchy.k_min; k <= hierarchy.k_max; ++k) {
        const double radius = inflation * hierarchy.scale_length(k);
        for (int center : hierarchy.net_at(k))
            family.balls.push_back({center, k, radius});
    }
    return family;
}

}  // namespace carleson
