// Acceptance suite: nine numbered checks over the full pipeline, one
// pass/fail line each. Run with no arguments for all nine, or pass criterion
// numbers to run a subset. Exit code is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "carleson/carleson.hpp"
#include "carleson/generators.hpp"
#include "carleson/jns.hpp"
#include "carleson/parallel.hpp"
#include "carleson/rng.hpp"
#include "carleson/theorem_check.hpp"

using namespace carleson;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

// ---------------------------------------------------------------------------
// criterion 1: the triangle-excess functional
//   nonnegativity, full permutation invariance, 2-Lipschitz dependence on
//   each argument, and vanishing on ordered collinear euclidean triples;
//   1e5 random triples per metric kind at 1e-9 relative tolerance
// ---------------------------------------------------------------------------
Outcome criterion1() {
    const int kTriples = 100000;
    const double tol = 1e-9;
    std::int64_t checked = 0;

    auto euclid = gen_lipschitz_graph(512, 1.5, 31);
    auto circle300 = gen_circle(300);
    std::vector<double> matrix(300 * 300, 0.0);
    for (int i = 0; i < 300; ++i)
        for (int j = 0; j < 300; ++j) matrix[i * 300 + j] = circle300.distance(i, j);
    auto explicit_space = MetricMeasureSpace::from_matrix(matrix, 300, circle300.weights());
    auto snow = MetricMeasureSpace::snowflake(gen_lipschitz_graph(512, 1.0, 32), 0.5);

    const MetricMeasureSpace* kinds[] = {&euclid, &explicit_space, &snow};
    const char* kind_names[] = {"euclidean", "matrix", "snowflake"};
    for (int kind = 0; kind < 3; ++kind) {
        const MetricMeasureSpace& s = *kinds[kind];
        const double scale = s.diameter();
        Rng rng = substream(401, "acceptance-delta", kind);
        for (int t = 0; t < kTriples; ++t) {
            int i = static_cast<int>(rng.next_below(s.size()));
            int j = static_cast<int>(rng.next_below(s.size()));
            int k = static_cast<int>(rng.next_below(s.size()));
            double d = s.excess_delta(i, j, k);
            if (!(d >= 0.0))
                return {false, std::string("negative excess on ") + kind_names[kind]};
            if (d != s.excess_delta(i, k, j) || d != s.excess_delta(j, i, k) ||
                d != s.excess_delta(j, k, i) || d != s.excess_delta(k, i, j) ||
                d != s.excess_delta(k, j, i))
                return {false, std::string("permutation variance on ") + kind_names[kind]};
            int i2 = static_cast<int>(rng.next_below(s.size()));
            double moved = s.excess_delta(i2, j, k);
            if (std::abs(d - moved) > 2.0 * s.distance(i, i2) + tol * scale)
                return {false, std::string("Lipschitz bound failed on ") + kind_names[kind]};
            ++checked;
        }
    }

    // ordered collinear euclidean triples
    Rng rng = substream(402, "acceptance-collinear");
    for (int t = 0; t < kTriples; ++t) {
        double x0 = rng.uniform(-1, 1), y0 = rng.uniform(-1, 1);
        double vx = rng.uniform(-1, 1), vy = rng.uniform(-1, 1);
        double t1 = rng.uniform(0, 1);
        double t2 = t1 + rng.uniform(0.01, 1);
        double t3 = t2 + rng.uniform(0.01, 1);
        auto s = MetricMeasureSpace::euclidean({x0 + t1 * vx, y0 + t1 * vy, x0 + t2 * vx,
                                                y0 + t2 * vy, x0 + t3 * vx, y0 + t3 * vy},
                                               2, {1, 1, 1});
        if (s.excess_delta(0, 1, 2) > tol * std::max(1.0, s.diameter()))
            return {false, "collinear triple with nonzero excess"};
        ++checked;
    }
    std::ostringstream os;
    os << checked << " triples across 3 metric kinds + collinear family";
    return {true, os.str()};
}

// ---------------------------------------------------------------------------
// criterion 2: cube-tree validation across the generator corpus at n <= 2048
// ---------------------------------------------------------------------------
Outcome criterion2() {
    struct Case {
        MetricMeasureSpace space;
        std::string name;
    };
    std::vector<Case> cases;
    for (int n : {256, 1024, 2048}) {
        cases.push_back({gen_segment(n), "segment-" + std::to_string(n)});
        cases.push_back({gen_circle(n), "circle-" + std::to_string(n)});
        cases.push_back({gen_lipschitz_graph(n, 1.0, 11), "lipschitz-" + std::to_string(n)});
        cases.push_back({gen_bpli_union(0.5, n, 11).space, "bpli-" + std::to_string(n)});
    }
    for (int level : {3, 4, 5})
        cases.push_back({gen_koch(level, 1.0471975511965976), "koch-" + std::to_string(level)});
    for (int g : {3, 4, 5})
        cases.push_back({gen_four_corner_cantor(g), "cantor-" + std::to_string(g)});

    std::int64_t cubes_checked = 0;
    for (const auto& c : cases) {
        int scales = auto_scale_count(c.space);
        NetHierarchy h = build_nets(c.space, 0, scales - 1, 1);
        for (int shift = 1; shift <= 3; ++shift) {
            Filtration f = build_filtration(c.space, h, shift, 3);
            auto violations = validate_filtration(c.space, f);
            if (!violations.empty()) {
                std::ostringstream os;
                os << c.name << " shift " << shift << ": " << violations.size()
                   << " violations, first: " << violations.front().cube_id << " "
                   << violations.front().invariant << " (" << violations.front().detail << ")";
                return {false, os.str()};
            }
            cubes_checked += static_cast<std::int64_t>(f.cubes.size());
        }
    }
    std::ostringstream os;
    os << cases.size() << " spaces x 3 shifts, " << cubes_checked << " cubes, zero violations";
    return {true, os.str()};
}

// ---------------------------------------------------------------------------
// criterion 3: normalized totals stay within a factor 1.5 across
//   n in {256, 512, 1024, 2048} for the rectifiable corpus; exact sums up to
//   n = 512, Monte Carlo above with its 3-sigma band small against the total
// ---------------------------------------------------------------------------
Outcome criterion3() {
    TheoremCheckConfig cfg;
    cfg.sets = {"segment", "circle", "lipschitz-0.5", "lipschitz-1", "lipschitz-2", "bpli"};
    cfg.sizes = {256, 512, 1024, 2048};
    cfg.seed = 11;
    cfg.estimator.exact_cutoff = 300;
    cfg.estimator.mc_samples = 100000;
    cfg.estimator.seed = 11;
    cfg.exact_up_to = 512;
    TheoremSummary summary = theorem_check(cfg);

    std::ostringstream os;
    bool ok = true;
    for (const auto& s : summary.sets) {
        if (s.classification != "bounded") ok = false;
        if (s.spread > 1.5) ok = false;
        os << s.name << " spread " << s.spread << " (" << s.classification << "); ";
    }
    return {ok, os.str()};
}

// MC sanity used inside criterion 3's ladder is covered by criterion 9; the
// band check here keeps the large-n estimates honest against their own error.
Outcome criterion3_band() {
    auto set = gen_bpli_union(0.5, 2048, 11);
    int scales = auto_scale_count(set.space);
    NetHierarchy h = build_nets(set.space, 0, scales - 1, 11);
    Filtration f = build_filtration(set.space, h, 1, 3);
    EstimatorConfig est;
    est.exact_cutoff = 300;
    est.mc_samples = 100000;
    est.seed = 11;
    CarlesonReport rep = carleson_sum_cubes(set.space, f, f.root, est);
    bool ok = rep.total > 0.0 && 3.0 * rep.total_stderr <= 0.05 * rep.total;
    std::ostringstream os;
    os << "3 sigma of the n=2048 estimate is " << 300.0 * rep.total_stderr / rep.total
       << "% of the total";
    return {ok, os.str()};
}

// ---------------------------------------------------------------------------
// criterion 4: growth on the four-corner Cantor ladder, against the pinned
//   baseline from the first exact run
// ---------------------------------------------------------------------------
Outcome criterion4() {
    // pinned 2026-08-09 from the exact run at generations 2..5, seed 1
    const double baseline[] = {0.12696054274387744, 0.16701528179127229,
                               0.21907861944553231, 0.2756145436481775};
    std::vector<double> ratios;
    for (int g = 2; g <= 5; ++g) {
        auto s = gen_four_corner_cantor(g);
        int scales = auto_scale_count(s);
        NetHierarchy h = build_nets(s, 0, scales - 1, 1);
        Filtration f = build_filtration(s, h, 1, 3);
        CarlesonReport rep = carleson_sum_cubes(s, f, f.root, EstimatorConfig::exact());
        ratios.push_back(rep.ratio);
    }
    std::ostringstream os;
    os << "ratios";
    for (double r : ratios) os << " " << r;
    for (int i = 0; i < 4; ++i)
        if (std::abs(ratios[i] - baseline[i]) > 1e-9 * baseline[i])
            return {false, os.str() + " drifted from the pinned baseline"};
    for (int i = 1; i < 4; ++i)
        if (ratios[i] <= ratios[i - 1]) return {false, os.str() + " not increasing"};
    // least-squares slope per generation
    double mean = (ratios[0] + ratios[1] + ratios[2] + ratios[3]) / 4.0;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 4; ++i) {
        num += (i - 1.5) * (ratios[i] - mean);
        den += (i - 1.5) * (i - 1.5);
    }
    double slope = num / den;
    os << ", slope " << slope << " vs floor " << 0.1 * ratios[0];
    if (slope <= 0.1 * ratios[0]) return {false, os.str()};
    return {true, os.str()};
}

// ---------------------------------------------------------------------------
// criterion 5: packing bound with the N / eta^2 constant on 1000 generated
//   instances, plus per-layer stopping mass decay
// ---------------------------------------------------------------------------
Outcome criterion5() {
    std::vector<JnsTree> shapes;
    {
        auto add_shape = [&](const MetricMeasureSpace& s, int scales) {
            NetHierarchy h = build_nets(s, 0, scales - 1, 1);
            shapes.push_back(JnsTree::from_filtration(build_filtration(s, h, 1, 3)));
        };
        add_shape(gen_segment(64), 5);
        add_shape(gen_segment(256), 7);
        add_shape(gen_circle(96), 6);
        add_shape(gen_lipschitz_graph(128, 1.0, 3), 6);
        add_shape(gen_four_corner_cantor(3), 6);
        add_shape(gen_bpli_union(0.5, 128, 7).space, 6);
    }
    const JnsStyle styles[] = {JnsStyle::uniform, JnsStyle::sparse, JnsStyle::adversarial};
    const std::pair<double, double> params[] = {
        {1.0, 0.5}, {4.0, 0.25}, {2.0, 0.75}, {3.0, 1.0}, {0.5, 0.6}};

    int bound_violations = 0, hypothesis_failures = 0, decay_failures = 0;
    double worst_ratio_over_bound = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const JnsTree& tree = shapes[t % shapes.size()];
        auto [N, eta] = params[(t / 3) % 5];
        JNSInstance inst =
            generate_instance(tree, styles[t % 3], N, eta, 9000 + static_cast<std::uint64_t>(t));
        JnsReport rep = verify_jns(inst);
        if (!rep.hypothesis_ok) {
            ++hypothesis_failures;
            continue;
        }
        if (!rep.pass) ++bound_violations;
        worst_ratio_over_bound = std::max(worst_ratio_over_bound, rep.worst_ratio / rep.bound);

        auto layers = stopping_time_decomposition(inst, inst.tree.root);
        double prev = 0.0;
        for (std::size_t l = 0; l < layers.size(); ++l) {
            double mass = 0.0;
            for (int q : layers[l]) mass += inst.tree.nodes[q].mass;
            if (l > 0 && mass > (1.0 - inst.eta) * prev + 1e-9) ++decay_failures;
            prev = mass;
        }
    }
    std::ostringstream os;
    os << "1000 instances; bound violations " << bound_violations << ", hypothesis failures "
       << hypothesis_failures << ", decay failures " << decay_failures
       << ", max worst_ratio/bound " << worst_ratio_over_bound;
    return {bound_violations == 0 && hypothesis_failures == 0 && decay_failures == 0, os.str()};
}

// ---------------------------------------------------------------------------
// criterion 6: decomposition of the per-cube sum into the distance term plus
//   the enlarged-domain term stays finite and stable as n doubles
// ---------------------------------------------------------------------------
Outcome criterion6() {
    std::vector<double> max_ratios;
    for (int n : {128, 256, 512}) {
        auto set = gen_bpli_union(0.5, n, 11);
        int scales = auto_scale_count(set.space);
        NetHierarchy h = build_nets(set.space, 0, scales - 1, 11);
        Filtration f = build_filtration(set.space, h, 1, 3);
        double max_ratio = 0.0;
        for (const Cube& q : f.cubes) {
            bool meets = false;
            for (int m : q.members)
                if (set.labels[m] == 1) {
                    meets = true;
                    break;
                }
            if (!meets) continue;
            auto d = approx_decomposition_check(set.space, q, set.etilde_set, 1.0,
                                                EstimatorConfig::exact());
            if (!std::isfinite(d.ratio)) return {false, "infinite ratio at cube " + q.id};
            max_ratio = std::max(max_ratio, d.ratio);
        }
        max_ratios.push_back(max_ratio);
    }
    std::ostringstream os;
    os << "max lhs/(dist+enlarged) per size:";
    for (double r : max_ratios) os << " " << r;
    bool ok = true;
    for (std::size_t i = 1; i < max_ratios.size(); ++i) {
        double a = max_ratios[i - 1], b = max_ratios[i];
        if (a > 1e-12 && b > 1e-12 && (b / a > 2.0 || a / b > 2.0)) ok = false;
    }
    return {ok, os.str()};
}

// ---------------------------------------------------------------------------
// criterion 7: the distance Carleson sum obeys the geometric-series bound
//   with constant 16
// ---------------------------------------------------------------------------
Outcome criterion7() {
    double worst = 0.0;
    std::string worst_at = "-";
    auto run_case = [&](const MetricMeasureSpace& space, const std::vector<int>& e_set,
                        const std::vector<int>& etilde, const std::string& name) {
        int scales = auto_scale_count(space);
        NetHierarchy h = build_nets(space, 0, scales - 1, 11);
        Filtration f = build_filtration(space, h, 1, 3);
        for (const Cube& q : f.cubes) {
            if (q.scale > 3) continue;  // roots and the next three scales
            int idx = f.find_cube(q.id);
            double v = dist_carleson_sum(space, e_set, etilde, f, idx);
            double c = v / q.nominal_diam;
            if (c > worst) {
                worst = c;
                worst_at = name + "/" + q.id;
            }
        }
    };
    for (int n : {256, 512, 1024}) {
        auto set = gen_bpli_union(0.5, n, 11);
        run_case(set.space, set.e_set, set.etilde_set, "bpli-" + std::to_string(n));
    }
    {
        auto seg = gen_segment(256);
        std::vector<int> all(256), left;
        for (int i = 0; i < 256; ++i) all[i] = i;
        for (int i = 0; i < 128; ++i) left.push_back(i);
        run_case(seg, all, left, "segment-halved");
    }
    std::ostringstream os;
    os << "max normalized distance sum " << worst << " at " << worst_at << " (bound 16)";
    return {worst <= 16.0, os.str()};
}

// ---------------------------------------------------------------------------
// criterion 8: ball-family and cube-tree forms agree within a factor of 8 at
//   matched centers and radii
// ---------------------------------------------------------------------------
Outcome criterion8() {
    struct Case {
        MetricMeasureSpace space;
        std::string name;
    };
    std::vector<Case> cases;
    cases.push_back({gen_circle(256), "circle-256"});
    cases.push_back({gen_circle(512), "circle-512"});
    cases.push_back({gen_lipschitz_graph(256, 1.0, 11), "lipschitz1-256"});
    cases.push_back({gen_lipschitz_graph(512, 2.0, 11), "lipschitz2-512"});
    cases.push_back({gen_four_corner_cantor(4), "cantor-4"});
    cases.push_back({gen_bpli_union(0.5, 512, 11).space, "bpli-512"});

    EstimatorConfig est;
    est.exact_cutoff = 300;
    est.mc_samples = 100000;
    est.seed = 8;
    std::ostringstream os;
    bool ok = true;
    for (const auto& c : cases) {
        int scales = auto_scale_count(c.space);
        NetHierarchy h = build_nets(c.space, 0, scales - 1, 1);
        Filtration f = build_filtration(c.space, h, 1, 3);
        CarlesonReport cubes = carleson_sum_cubes(c.space, f, f.root, est);
        BallFamily fam = multiresolution_balls(h, 4.0);
        int x = f.cubes[f.root].center;
        CarlesonReport balls = carleson_sum_balls(c.space, fam, x, c.space.diameter() / 2.0, est);
        double factor = balls.ratio / cubes.ratio;
        os << c.name << " " << factor << "; ";
        if (!(factor <= 8.0 && factor >= 1.0 / 8.0)) ok = false;
    }
    return {ok, os.str()};
}

// ---------------------------------------------------------------------------
// criterion 9: bit-identical reports across thread counts; Monte Carlo within
//   3 reported standard errors of exact values on >= 95% of 200 trials
// ---------------------------------------------------------------------------
Outcome criterion9() {
    // determinism across thread counts
    {
        auto set = gen_bpli_union(0.5, 512, 3);
        int scales = auto_scale_count(set.space);
        NetHierarchy h = build_nets(set.space, 0, scales - 1, 3);
        Filtration f = build_filtration(set.space, h, 1, 3);
        EstimatorConfig est;
        est.exact_cutoff = 100;
        est.mc_samples = 20000;
        est.seed = 5;
        set_thread_cap(1);
        std::string r1 = carleson_sum_cubes(set.space, f, f.root, est).to_json().dump();
        set_thread_cap(4);
        std::string r4 = carleson_sum_cubes(set.space, f, f.root, est).to_json().dump();
        set_thread_cap(3);
        std::string r3 = carleson_sum_cubes(set.space, f, f.root, est).to_json().dump();
        set_thread_cap(0);
        if (r1 != r4 || r1 != r3) return {false, "reports differ across thread counts"};
    }

    // Monte Carlo calibration on cubes with at most 300 members
    auto circle = gen_circle(400);
    int scales = auto_scale_count(circle);
    NetHierarchy h = build_nets(circle, 0, scales - 1, 1);
    Filtration f = build_filtration(circle, h, 1, 3);
    std::vector<int> picks;
    for (std::size_t i = 0; i < f.cubes.size() && picks.size() < 10; ++i) {
        std::size_t m = f.cubes[i].members.size();
        if (m >= 30 && m <= 300) picks.push_back(static_cast<int>(i));
    }
    if (picks.size() < 5) return {false, "not enough mid-sized cubes to calibrate"};

    int trials = 0, hits = 0;
    for (int round = 0; trials < 200; ++round) {
        for (int ci : picks) {
            if (trials >= 200) break;
            const Cube& q = f.cubes[ci];
            double exact = beta3_cube(circle, q, EstimatorConfig::exact());
            EstimatorConfig mc;
            mc.exact_cutoff = 10;
            mc.mc_samples = 100000;
            mc.seed = 7000 + round * 131 + ci;
            TripleSumEstimate est = beta3_cube_estimate(circle, q, mc);
            if (std::abs(est.value - exact) <= 3.0 * est.stderr_) ++hits;
            ++trials;
        }
    }
    std::ostringstream os;
    os << "thread-count invariance ok; MC within 3 sigma on " << hits << "/" << trials
       << " trials";
    return {hits * 100 >= trials * 95, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int number;
        const char* title;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> criteria = {
        {1, "triangle-excess functional suite", criterion1},
        {2, "cube-tree validation across the corpus", criterion2},
        {3, "rectifiable corpus has stable normalized totals", criterion3},
        {4, "Cantor ladder grows against the pinned baseline", criterion4},
        {5, "packing bound N/eta^2 over 1000 instances", criterion5},
        {6, "distance + enlarged-domain decomposition is stable", criterion6},
        {7, "distance sums obey the geometric-series bound", criterion7},
        {8, "ball and cube forms agree within a factor of 8", criterion8},
        {9, "determinism and estimator calibration", criterion9},
    };

    std::vector<int> selected;
    for (int a = 1; a < argc; ++a) selected.push_back(std::atoi(argv[a]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), c.number) == selected.end())
            continue;
        auto start = std::chrono::steady_clock::now();
        Outcome out = c.run();
        if (c.number == 3 && out.pass) {
            Outcome band = criterion3_band();
            out.pass = band.pass;
            out.detail += band.detail;
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << c.number << ": " << c.title
                  << " [" << out.detail << "] (" << secs << "s)\n";
        failures += out.pass ? 0 : 1;
    }
    return failures;
}
