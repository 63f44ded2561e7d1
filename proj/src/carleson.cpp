#include "carleson/carleson.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "carleson/kahan.hpp"
#include "carleson/parallel.hpp"
#include "carleson/rng.hpp"

namespace carleson {

namespace {

nlohmann::json config_json(const EstimatorConfig& c) {
    return {{"exact_cutoff", c.exact_cutoff},
            {"mc_samples", c.mc_samples},
            {"seed", c.seed},
            {"repeats", c.repeats}};
}

// Shared aggregation path for both forms. Entries must already be in the
// fixed reduction order.
void aggregate(CarlesonReport& report) {
    std::map<int, PerScaleRow> rows;
    KahanSum total;
    KahanSum var;
    for (const PerCubeBeta& e : report.per_cube) {
        auto& row = rows[e.scale];
        row.scale = e.scale;
        row.count += 1;
        total.add(e.beta3);
        var.add(e.stderr_ * e.stderr_);
    }
    for (auto& [scale, row] : rows) {
        KahanSum s;
        for (const PerCubeBeta& e : report.per_cube)
            if (e.scale == scale) s.add(e.beta3);
        row.sum = s.value();
        row.normalized = report.normalizer > 0.0 ? row.sum / report.normalizer : 0.0;
        report.per_scale.push_back(row);
    }
    report.total = total.value();
    report.total_stderr = std::sqrt(var.value());
    report.ratio = report.normalizer > 0.0 ? report.total / report.normalizer : 0.0;
}

std::vector<int> enlarged_domain(const MetricMeasureSpace& space, const Cube& cube,
                                 std::span<const int> domain, double a_prime) {
    const double reach = a_prime * cube.nominal_diam;
    std::vector<int> result;
    for (int x : domain) {
        double d = space.dist_to_set(x, cube.members);
        if (d <= reach) result.push_back(x);
    }
    return result;
}

}  // namespace

nlohmann::json CarlesonReport::to_json() const {
    nlohmann::json per_cube_json = nlohmann::json::array();
    for (const auto& e : per_cube)
        per_cube_json.push_back({{"id", e.id},
                                 {"scale", e.scale},
                                 {"beta3", e.beta3},
                                 {"method", e.exact ? "exact" : "mc"},
                                 {"stderr", e.stderr_}});
    nlohmann::json per_scale_json = nlohmann::json::array();
    for (const auto& r : per_scale)
        per_scale_json.push_back({{"scale", r.scale},
                                  {"count", r.count},
                                  {"sum", r.sum},
                                  {"normalized_sum", r.normalized}});
    return {{"form", form},
            {"total", total},
            {"normalizer", normalizer},
            {"ratio", ratio},
            {"total_stderr", total_stderr},
            {"per_scale", per_scale_json},
            {"per_cube", per_cube_json},
            {"config", config_json(config)}};
}

void CarlesonReport::write_scales_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "scale,count,sum,normalized_sum\n";
    out.precision(17);
    for (const auto& r : per_scale)
        out << r.scale << "," << r.count << "," << r.sum << "," << r.normalized << "\n";
}

TripleSumEstimate beta3_cube_estimate(const MetricMeasureSpace& space, const Cube& cube,
                                      const EstimatorConfig& config) {
    if (cube.members.empty()) throw std::invalid_argument("beta3 of an empty cube");
    TripleSumEstimate est = triple_delta_sum(space, cube.members, config, hash_label(cube.id));
    const double norm = cube.nominal_diam * cube.nominal_diam * cube.nominal_diam;
    est.value /= norm;
    est.stderr_ /= norm;
    return est;
}

double beta3_cube(const MetricMeasureSpace& space, const Cube& cube,
                  const EstimatorConfig& config) {
    return beta3_cube_estimate(space, cube, config).value;
}

TripleSumEstimate beta3_enlarged_estimate(const MetricMeasureSpace& space, const Cube& cube,
                                          std::span<const int> domain, double a_prime,
                                          const EstimatorConfig& config) {
    if (cube.members.empty()) throw std::invalid_argument("beta3 of an empty cube");
    if (a_prime < 0.0) throw std::invalid_argument("enlargement factor must be >= 0");
    std::vector<int> eff = enlarged_domain(space, cube, domain, a_prime);
    if (eff.empty()) return TripleSumEstimate{};
    TripleSumEstimate est =
        triple_delta_sum(space, eff, config, hash_label(cube.id) ^ 0x9e3779b97f4a7c15ULL);
    const double norm = cube.nominal_diam * cube.nominal_diam * cube.nominal_diam;
    est.value /= norm;
    est.stderr_ /= norm;
    return est;
}

double beta3_enlarged(const MetricMeasureSpace& space, const Cube& cube,
                      std::span<const int> domain, double a_prime,
                      const EstimatorConfig& config) {
    return beta3_enlarged_estimate(space, cube, domain, a_prime, config).value;
}

CarlesonReport carleson_sum_cubes(const MetricMeasureSpace& space, const Filtration& filtration,
                                  int q0, const EstimatorConfig& config) {
    config.validate();
    if (q0 < 0 || q0 >= static_cast<int>(filtration.cubes.size()))
        throw std::invalid_argument("q0 is not a cube of the filtration");

    // collect the subtree in deterministic (scale, insertion) order
    std::vector<int> subtree;
    {
        std::vector<int> stack = {q0};
        while (!stack.empty()) {
            int i = stack.back();
            stack.pop_back();
            subtree.push_back(i);
            for (int c : filtration.cubes[i].children) stack.push_back(c);
        }
        std::sort(subtree.begin(), subtree.end());
    }

    std::vector<TripleSumEstimate> estimates(subtree.size());
    parallel_for(static_cast<std::int64_t>(subtree.size()), [&](std::int64_t i) {
        estimates[i] = beta3_cube_estimate(space, filtration.cubes[subtree[i]], config);
    });

    CarlesonReport report;
    report.form = "cubes";
    report.config = config;
    report.normalizer = filtration.cubes[q0].nominal_diam;
    report.per_cube.reserve(subtree.size());
    for (std::size_t i = 0; i < subtree.size(); ++i) {
        const Cube& q = filtration.cubes[subtree[i]];
        report.per_cube.push_back(
            {q.id, q.scale, estimates[i].value, estimates[i].exact, estimates[i].stderr_});
    }
    aggregate(report);
    return report;
}

CarlesonReport carleson_sum_balls(const MetricMeasureSpace& space, const BallFamily& family,
                                  int x, double r, const EstimatorConfig& config) {
    config.validate();
    if (!(r > 0.0) || r > space.diameter() * (1.0 + 1e-12))
        throw std::invalid_argument("need 0 < r <= diameter");

    std::vector<char> inside(space.size(), 0);
    for (int j = 0; j < space.size(); ++j)
        if (space.distance(x, j) <= 2.0 * r) inside[j] = 1;

    struct Entry {
        int family_index;
        std::vector<int> members;
    };
    std::vector<Entry> included;
    for (std::size_t b = 0; b < family.balls.size(); ++b) {
        const BallFamilyEntry& ball = family.balls[b];
        std::vector<int> members = space.ball(ball.center, ball.radius);
        bool contained = true;
        for (int m : members) {
            if (!inside[m]) {
                contained = false;
                break;
            }
        }
        if (contained) included.push_back({static_cast<int>(b), std::move(members)});
    }

    std::vector<TripleSumEstimate> estimates(included.size());
    parallel_for(static_cast<std::int64_t>(included.size()), [&](std::int64_t i) {
        const BallFamilyEntry& ball = family.balls[included[i].family_index];
        std::string tag = "b:" + std::to_string(ball.scale) + ":" + std::to_string(ball.center);
        TripleSumEstimate est =
            triple_delta_sum(space, included[i].members, config, hash_label(tag));
        const double diam = 2.0 * ball.radius;
        est.value /= diam * diam * diam;
        est.stderr_ /= diam * diam * diam;
        estimates[i] = est;
    });

    CarlesonReport report;
    report.form = "balls";
    report.config = config;
    report.normalizer = r;
    report.per_cube.reserve(included.size());
    for (std::size_t i = 0; i < included.size(); ++i) {
        const BallFamilyEntry& ball = family.balls[included[i].family_index];
        report.per_cube.push_back(
            {"b:" + std::to_string(ball.scale) + ":" + std::to_string(ball.center), ball.scale,
             estimates[i].value, estimates[i].exact, estimates[i].stderr_});
    }
    aggregate(report);
    return report;
}

double dist_carleson_sum(const MetricMeasureSpace& space, std::span<const int> e_set,
                         std::span<const int> etilde, const Filtration& filtration, int q1) {
    if (etilde.empty()) throw std::invalid_argument("dist_carleson_sum: empty reference set");
    if (q1 < 0 || q1 >= static_cast<int>(filtration.cubes.size()))
        throw std::invalid_argument("q1 is not a cube of the filtration");

    std::vector<char> in_e(space.size(), 0);
    for (int i : e_set) in_e[i] = 1;
    std::vector<char> in_etilde(space.size(), 0);
    for (int i : etilde) in_etilde[i] = 1;
    std::vector<double> dist_cache(space.size(), -1.0);

    KahanSum total;
    std::vector<int> stack = {q1};
    std::vector<int> subtree;
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        subtree.push_back(i);
        for (int c : filtration.cubes[i].children) stack.push_back(c);
    }
    std::sort(subtree.begin(), subtree.end());
    for (int i : subtree) {
        const Cube& q = filtration.cubes[i];
        bool meets = false;
        for (int m : q.members) {
            if (in_etilde[m]) {
                meets = true;
                break;
            }
        }
        if (!meets) continue;
        KahanSum cube_sum;
        for (int m : q.members) {
            if (!in_e[m]) continue;
            if (dist_cache[m] < 0.0) dist_cache[m] = space.dist_to_set(m, etilde);
            cube_sum.add(dist_cache[m] * space.weight(m));
        }
        total.add(cube_sum.value() / q.nominal_diam);
    }
    return total.value();
}

ApproxDecomposition approx_decomposition_check(const MetricMeasureSpace& space, const Cube& cube,
                                               std::span<const int> etilde, double a_prime,
                                               const EstimatorConfig& config) {
    if (cube.members.empty() || etilde.empty())
        throw std::invalid_argument("approx_decomposition_check: empty cube or reference set");
    ApproxDecomposition out;
    out.lhs = beta3_cube(space, cube, config);
    KahanSum dist_sum;
    for (int m : cube.members) dist_sum.add(space.dist_to_set(m, etilde) * space.weight(m));
    out.dist_term = dist_sum.value() / cube.nominal_diam;
    out.enlarged_term = beta3_enlarged(space, cube, etilde, a_prime, config);
    const double denom = out.dist_term + out.enlarged_term;
    if (out.lhs <= 0.0)
        out.ratio = 0.0;
    else if (denom <= 0.0)
        out.ratio = std::numeric_limits<double>::infinity();
    else
        out.ratio = out.lhs / denom;
    return out;
}

double alpha_of_cube(const MetricMeasureSpace& space, const Cube& cube,
                     std::span<const int> e_set, const EstimatorConfig& config) {
    return beta3_enlarged(space, cube, e_set, 1.0, config) / cube.nominal_diam;
}

}  // namespace carleson
