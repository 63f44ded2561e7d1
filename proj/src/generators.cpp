#include "carleson/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "carleson/kahan.hpp"
#include "carleson/rng.hpp"

namespace carleson {

namespace {

struct Polyline {
    std::vector<double> xs, ys;  // vertices
    std::vector<double> cumlen;  // cumulative arclength, cumlen[0] = 0

    void finish() {
        cumlen.assign(xs.size(), 0.0);
        for (std::size_t i = 1; i < xs.size(); ++i) {
            double dx = xs[i] - xs[i - 1];
            double dy = ys[i] - ys[i - 1];
            cumlen[i] = cumlen[i - 1] + std::hypot(dx, dy);
        }
    }
    double length() const { return cumlen.back(); }

    // point at arclength t
    std::pair<double, double> at(double t) const {
        auto it = std::upper_bound(cumlen.begin(), cumlen.end(), t);
        std::size_t seg = it == cumlen.begin() ? 1 : static_cast<std::size_t>(it - cumlen.begin());
        if (seg >= xs.size()) seg = xs.size() - 1;
        double lo = cumlen[seg - 1];
        double hi = cumlen[seg];
        double u = hi > lo ? (t - lo) / (hi - lo) : 0.0;
        return {xs[seg - 1] + u * (xs[seg] - xs[seg - 1]),
                ys[seg - 1] + u * (ys[seg] - ys[seg - 1])};
    }

    // unit tangent of the segment containing arclength t
    std::pair<double, double> tangent_at(double t) const {
        auto it = std::upper_bound(cumlen.begin(), cumlen.end(), t);
        std::size_t seg = it == cumlen.begin() ? 1 : static_cast<std::size_t>(it - cumlen.begin());
        if (seg >= xs.size()) seg = xs.size() - 1;
        double dx = xs[seg] - xs[seg - 1];
        double dy = ys[seg] - ys[seg - 1];
        double len = std::hypot(dx, dy);
        return {dx / len, dy / len};
    }
};

// equal-arclength samples at midpoints of n slots; weight = length / n
void sample_polyline(const Polyline& line, int count, std::vector<double>& coords,
                     std::vector<double>& weights) {
    if (count <= 0) return;
    const double step = line.length() / count;
    for (int i = 0; i < count; ++i) {
        auto [x, y] = line.at((i + 0.5) * step);
        coords.push_back(x);
        coords.push_back(y);
        weights.push_back(step);
    }
}

// Random function with a calibrated slope bound. The graph is a chain of
// circular arcs of one fixed radius whose orientation flips at seeded random
// positions (and at the slope rails +/- 0.95 L), so bending is spread
// uniformly along the curve the way it is on a circle. Concentrated bending
// makes multiscale sums hostage to whether one bendy stretch lands inside a
// single cube, and refinements of the same curve then disagree.
Polyline random_lipschitz_polyline(double lipschitz_constant, std::uint64_t seed,
                                   std::string_view stream) {
    constexpr int kGrid = 4096;
    const double rail = 0.95 * lipschitz_constant;
    const double curvature = 4.0 * lipschitz_constant;
    Rng rng = substream(seed, stream);

    std::vector<char> flip(kGrid + 1, 0);
    for (int t = 0; t < 8; ++t) flip[rng.next_below(kGrid)] = 1;
    double v = rng.uniform(-rail, rail);
    double dir = rng.next_double() < 0.5 ? -1.0 : 1.0;

    Polyline line;
    line.xs.reserve(kGrid + 1);
    line.ys.reserve(kGrid + 1);
    line.xs.push_back(0.0);
    line.ys.push_back(0.0);
    double y = 0.0;
    const double dx = 1.0 / kGrid;
    for (int i = 1; i <= kGrid; ++i) {
        if (flip[i]) dir = -dir;
        // dv/dx = curvature * (1 + v^2)^{3/2} keeps the graph curvature constant
        v += dir * curvature * std::pow(1.0 + v * v, 1.5) * dx;
        if (v > rail) {
            v = rail;
            dir = -dir;
        } else if (v < -rail) {
            v = -rail;
            dir = -dir;
        }
        y += v * dx;
        line.xs.push_back(i * dx);
        line.ys.push_back(y);
    }
    line.finish();
    return line;
}

}  // namespace

MetricMeasureSpace gen_segment(int n) {
    if (n < 2) throw std::invalid_argument("segment needs n >= 2");
    std::vector<double> coords;
    std::vector<double> weights(n, 1.0 / n);
    coords.reserve(2 * n);
    for (int i = 0; i < n; ++i) {
        coords.push_back(static_cast<double>(i) / (n - 1));
        coords.push_back(0.0);
    }
    return MetricMeasureSpace::euclidean(std::move(coords), 2, std::move(weights));
}

MetricMeasureSpace gen_circle(int n) {
    if (n < 3) throw std::invalid_argument("circle needs n >= 3");
    const double radius = 1.0 / (2.0 * std::numbers::pi);
    std::vector<double> coords;
    std::vector<double> weights(n, 1.0 / n);
    coords.reserve(2 * n);
    for (int i = 0; i < n; ++i) {
        double angle = 2.0 * std::numbers::pi * i / n;
        coords.push_back(radius * std::cos(angle));
        coords.push_back(radius * std::sin(angle));
    }
    return MetricMeasureSpace::euclidean(std::move(coords), 2, std::move(weights));
}

MetricMeasureSpace gen_lipschitz_graph(int n, double lipschitz_constant, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("graph sampling needs n >= 2");
    if (lipschitz_constant < 0.0) throw std::invalid_argument("Lipschitz constant must be >= 0");
    Polyline line;
    if (lipschitz_constant == 0.0) {
        line.xs = {0.0, 1.0};
        line.ys = {0.0, 0.0};
        line.finish();
    } else {
        line = random_lipschitz_polyline(lipschitz_constant, seed, "lipschitz-graph");
    }
    std::vector<double> coords;
    std::vector<double> weights;
    sample_polyline(line, n, coords, weights);
    return MetricMeasureSpace::euclidean(std::move(coords), 2, std::move(weights));
}

MetricMeasureSpace gen_koch(int level, double angle) {
    if (level < 0) throw std::invalid_argument("level must be >= 0");
    if (!(angle > 0.0) || !(angle < std::numbers::pi / 2))
        throw std::invalid_argument("angle must lie in (0, pi/2)");
    // one edge becomes four of length ell = 1 / (2 (1 + cos angle)) per unit
    const double ell = 1.0 / (2.0 * (1.0 + std::cos(angle)));
    std::vector<std::pair<double, double>> pts = {{0.0, 0.0}, {1.0, 0.0}};
    for (int l = 0; l < level; ++l) {
        std::vector<std::pair<double, double>> next;
        next.reserve(4 * (pts.size() - 1) + 1);
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            auto [ax, ay] = pts[i];
            auto [bx, by] = pts[i + 1];
            double ux = bx - ax, uy = by - ay;
            double c = std::cos(angle), s = std::sin(angle);
            double p1x = ax + ell * ux, p1y = ay + ell * uy;
            double p2x = p1x + ell * (c * ux - s * uy), p2y = p1y + ell * (s * ux + c * uy);
            double p3x = bx - ell * ux, p3y = by - ell * uy;
            next.push_back({ax, ay});
            next.push_back({p1x, p1y});
            next.push_back({p2x, p2y});
            next.push_back({p3x, p3y});
        }
        next.push_back(pts.back());
        pts = std::move(next);
    }
    const int n = static_cast<int>(pts.size());
    std::vector<double> coords;
    coords.reserve(2 * n);
    for (auto [x, y] : pts) {
        coords.push_back(x);
        coords.push_back(y);
    }
    std::vector<double> weights(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        double len = std::hypot(pts[i + 1].first - pts[i].first, pts[i + 1].second - pts[i].second);
        weights[i] += len / 2;
        weights[i + 1] += len / 2;
    }
    return MetricMeasureSpace::euclidean(std::move(coords), 2, std::move(weights));
}

MetricMeasureSpace gen_four_corner_cantor(int generation) {
    if (generation < 1 || generation > 10)
        throw std::invalid_argument("generation must lie in [1, 10]");
    std::vector<std::pair<double, double>> centers = {{0.5, 0.5}};
    double side = 1.0;
    for (int g = 0; g < generation; ++g) {
        std::vector<std::pair<double, double>> next;
        next.reserve(4 * centers.size());
        const double off = 3.0 * side / 8.0;  // corner sub-square of side s/4
        for (auto [cx, cy] : centers) {
            next.push_back({cx - off, cy - off});
            next.push_back({cx - off, cy + off});
            next.push_back({cx + off, cy - off});
            next.push_back({cx + off, cy + off});
        }
        centers = std::move(next);
        side /= 4.0;
    }
    const int n = static_cast<int>(centers.size());
    std::vector<double> coords;
    coords.reserve(2 * n);
    for (auto [x, y] : centers) {
        coords.push_back(x);
        coords.push_back(y);
    }
    std::vector<double> weights(n, std::pow(4.0, -generation));
    return MetricMeasureSpace::euclidean(std::move(coords), 2, std::move(weights));
}

BpliSet gen_bpli_union(double theta, int n, std::uint64_t seed) {
    if (!(theta > 0.0) || theta > 1.0) throw std::invalid_argument("theta must lie in (0, 1]");
    if (n < 8) throw std::invalid_argument("need n >= 8");

    Polyline curve = random_lipschitz_polyline(0.5, seed, "bpli-curve");
    const double curve_len = curve.length();

    // fragment layout from the seed only; lengths sum to the garbage share
    struct Fragment {
        double x0, y0, x1, y1, len;
    };
    std::vector<Fragment> fragments;
    if (theta < 1.0) {
        constexpr int kFragments = 16;
        Rng rng = substream(seed, "bpli-fragments");
        const double garbage_total = curve_len * (1.0 - theta) / theta;
        std::vector<double> raw(kFragments);
        double raw_sum = 0.0;
        for (double& v : raw) {
            v = 0.5 + rng.next_double();
            raw_sum += v;
        }
        for (int j = 0; j < kFragments; ++j) {
            const double len = garbage_total * raw[j] / raw_sum;
            // anchor strung along the curve with jitter, offset sideways by
            // about a fragment length
            double t = (j + 0.5 + 0.4 * (rng.next_double() - 0.5)) / kFragments;
            double at_len = std::clamp(t, 0.02, 0.98) * curve_len;
            auto [ax, ay] = curve.at(at_len);
            auto [tx, ty] = curve.tangent_at(at_len);
            double side = rng.next_double() < 0.5 ? -1.0 : 1.0;
            double offset = len * (0.4 + 0.5 * rng.next_double());
            double cx = ax - ty * side * offset;
            double cy = ay + tx * side * offset;
            double tilt = rng.uniform(-0.4, 0.4);
            double dx = tx * std::cos(tilt) - ty * std::sin(tilt);
            double dy = tx * std::sin(tilt) + ty * std::cos(tilt);
            fragments.push_back(
                {cx - dx * len / 2, cy - dy * len / 2, cx + dx * len / 2, cy + dy * len / 2, len});
        }
    }

    // sample counts proportional to component length, largest remainder
    double total_len = curve_len;
    for (const auto& f : fragments) total_len += f.len;
    std::vector<double> lens = {curve_len};
    for (const auto& f : fragments) lens.push_back(f.len);
    std::vector<int> counts(lens.size(), 0);
    int assigned = 0;
    std::vector<std::pair<double, int>> remainders;
    for (std::size_t c = 0; c < lens.size(); ++c) {
        double ideal = lens[c] * n / total_len;
        counts[c] = static_cast<int>(std::floor(ideal));
        assigned += counts[c];
        remainders.push_back({ideal - std::floor(ideal), static_cast<int>(c)});
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t r = 0; assigned < n; r = (r + 1) % remainders.size(), ++assigned)
        counts[remainders[r].second] += 1;
    while (counts[0] < 2) {  // the curve always keeps at least two samples
        auto big = std::max_element(counts.begin() + 1, counts.end());
        if (big == counts.end() || *big == 0) break;
        --*big;
        ++counts[0];
    }

    std::vector<double> coords;
    std::vector<double> weights;
    std::vector<int> labels;
    sample_polyline(curve, counts[0], coords, weights);
    labels.assign(counts[0], 1);
    for (std::size_t f = 0; f < fragments.size(); ++f) {
        Polyline seg;
        seg.xs = {fragments[f].x0, fragments[f].x1};
        seg.ys = {fragments[f].y0, fragments[f].y1};
        seg.finish();
        sample_polyline(seg, counts[f + 1], coords, weights);
        labels.insert(labels.end(), counts[f + 1], 0);
    }

    BpliSet out{MetricMeasureSpace::euclidean(std::move(coords), 2, std::move(weights)),
                {}, {}, {}};
    out.labels = std::move(labels);
    for (int i = 0; i < out.space.size(); ++i) {
        out.e_set.push_back(i);
        if (out.labels[i] == 1) out.etilde_set.push_back(i);
    }
    return out;
}

bool check_big_piece(const MetricMeasureSpace& space, std::span<const int> e_set,
                     std::span<const int> etilde_set, const Cube& q0, double theta) {
    std::vector<char> in_e(space.size(), 0);
    for (int i : e_set) in_e[i] = 1;
    std::vector<char> in_etilde(space.size(), 0);
    for (int i : etilde_set) in_etilde[i] = 1;
    KahanSum mass;
    for (int m : q0.members)
        if (in_e[m] && in_etilde[m]) mass.add(space.weight(m));
    return mass.value() >= theta * q0.nominal_diam;
}

}  // namespace carleson
