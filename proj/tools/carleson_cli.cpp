// Command-line front end: point-set generation, cube dumps, multiscale
// flatness reports, packing-lemma verification, regularity diagnostics, and
// the boundedness-vs-growth batch check.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "carleson/carleson.hpp"
#include "carleson/csv_io.hpp"
#include "carleson/cubes.hpp"
#include "carleson/generators.hpp"
#include "carleson/jns.hpp"
#include "carleson/theorem_check.hpp"

namespace {

using namespace carleson;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitInput = 2;

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text << "\n";
}

struct BuildOptions {
    int scales = 0;  // 0 = auto
    int shift = 1;
    int p1 = 3;
    std::uint64_t seed = 1;
};

Filtration build_tree(const MetricMeasureSpace& space, const BuildOptions& opt,
                      NetHierarchy* hierarchy_out = nullptr) {
    int scales = opt.scales > 0 ? opt.scales : auto_scale_count(space);
    NetHierarchy h = build_nets(space, 0, scales - 1, opt.seed);
    Filtration f = build_filtration(space, h, opt.shift, opt.p1);
    if (hierarchy_out) *hierarchy_out = std::move(h);
    return f;
}

int report_violations(const std::vector<FiltrationViolation>& violations) {
    for (const auto& v : violations)
        std::cerr << "violation: cube " << v.cube_id << " " << v.invariant << " (" << v.measured
                  << "): " << v.detail << "\n";
    return violations.empty() ? kExitOk : kExitValidation;
}

nlohmann::json cube_dump(const Filtration& f) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Cube& q : f.cubes) {
        arr.push_back({{"id", q.id},
                       {"scale", q.scale},
                       {"center", q.center},
                       {"parent", q.parent < 0 ? nlohmann::json(nullptr)
                                               : nlohmann::json(f.cubes[q.parent].id)},
                       {"member_count", q.members.size()},
                       {"nominal_diam", q.nominal_diam},
                       {"actual_diam", q.actual_diam},
                       {"mass", q.mass}});
    }
    return arr;
}

int run_generate(const std::string& kind, int count, double lipschitz, double angle, double theta,
                 std::uint64_t seed, const std::string& out) {
    std::vector<int> labels;
    MetricMeasureSpace space = [&] {
        if (kind == "segment") return gen_segment(count);
        if (kind == "circle") return gen_circle(count);
        if (kind == "lipschitz") return gen_lipschitz_graph(count, lipschitz, seed);
        if (kind == "koch") return gen_koch(count, angle);
        if (kind == "cantor") return gen_four_corner_cantor(count);
        if (kind == "bpli") {
            BpliSet set = gen_bpli_union(theta, count, seed);
            labels = set.labels;
            return std::move(set.space);
        }
        throw std::invalid_argument("unknown generator kind: " + kind);
    }();
    write_point_cloud_csv(out, space);
    if (!labels.empty()) write_labels(out + ".labels", labels);
    std::cout << "wrote " << space.size() << " points to " << out << "\n";
    return kExitOk;
}

EstimatorConfig make_estimator(const std::string& estimator, std::int64_t exact_cutoff,
                               std::int64_t mc_samples, int repeats, std::uint64_t seed) {
    EstimatorConfig cfg;
    if (estimator == "exact")
        cfg.exact_cutoff = std::numeric_limits<std::int64_t>::max();
    else
        cfg.exact_cutoff = exact_cutoff;
    cfg.mc_samples = mc_samples;
    cfg.repeats = repeats;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiscale flatness sums and packing checks on finite metric measure spaces"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "emit a point-cloud CSV for a named set");
    std::string gen_kind;
    int gen_count = 256;
    double gen_lipschitz = 1.0, gen_angle = 1.0471975511965976, gen_theta = 0.5;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "points.csv";
    gen->add_option("kind", gen_kind, "segment|circle|lipschitz|koch|cantor|bpli")->required();
    gen->add_option("count", gen_count, "point count (level for koch, generation for cantor)");
    gen->add_option("--L", gen_lipschitz, "Lipschitz constant (lipschitz)");
    gen->add_option("--angle", gen_angle, "bump angle in radians (koch)");
    gen->add_option("--theta", gen_theta, "curve mass share in (0,1] (bpli)");
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_option("--out", gen_out, "output CSV path")->required();

    // shared input/build flags
    auto add_build_flags = [](CLI::App* cmd, std::string& input, BuildOptions& build) {
        cmd->add_option("input", input, "point-cloud CSV (x_1,...,x_dim,weight per row)");
        cmd->add_option("--scales", build.scales, "scale levels (default: auto from spacing)");
        cmd->add_option("--shift", build.shift, "filtration shift index in [1, p1]");
        cmd->add_option("--p1", build.p1, "number of shifted filtrations");
        cmd->add_option("--seed", build.seed, "root seed for all substreams");
    };

    // cubes
    auto* cubes_cmd = app.add_subcommand("cubes", "build a cube tree, validate, dump JSON");
    std::string cubes_input, cubes_out;
    BuildOptions cubes_build;
    add_build_flags(cubes_cmd, cubes_input, cubes_build);
    cubes_cmd->add_option("--out", cubes_out, "output JSON path (default stdout)");

    // analyze
    auto* an = app.add_subcommand("analyze", "multiscale flatness report");
    std::string an_input, an_matrix, an_weights, an_out, an_scales_csv, an_form = "cubes";
    std::string an_estimator = "mc";
    BuildOptions an_build;
    std::int64_t an_cutoff = 300, an_samples = 100000;
    int an_repeats = 1;
    double an_A = 4.0, an_A_prime = 8.0, an_r = 0.0;
    int an_x = 0;
    add_build_flags(an, an_input, an_build);
    an->add_option("--matrix", an_matrix, "distance-matrix CSV instead of a point cloud");
    an->add_option("--weights", an_weights, "one-column weight CSV (with --matrix)");
    an->add_option("--estimator", an_estimator, "exact|mc")
        ->check(CLI::IsMember({"exact", "mc"}));
    an->add_option("--exact-cutoff", an_cutoff, "largest member count summed exactly");
    an->add_option("--mc-samples", an_samples, "Monte Carlo triples per large cube");
    an->add_option("--repeats", an_repeats, "independent MC repetitions");
    an->add_option("--A", an_A, "ball family inflation constant");
    an->add_option("--A-prime", an_A_prime, "enlarged-domain reach factor");
    an->add_option("--form", an_form, "cubes|balls")->check(CLI::IsMember({"cubes", "balls"}));
    an->add_option("--x", an_x, "ball-form center point index");
    an->add_option("--r", an_r, "ball-form radius (default diameter/2)");
    std::string an_etilde;
    an->add_option("--etilde", an_etilde,
                   "label file marking a reference subset; adds distance-sum and "
                   "decomposition diagnostics against it");
    an->add_option("--out", an_out, "report JSON path (default stdout)");
    an->add_option("--scales-csv", an_scales_csv, "per-scale CSV path");

    // regularity
    auto* reg = app.add_subcommand("regularity", "empirical mass/radius ratio bounds");
    std::string reg_input, reg_out;
    double reg_rmin = 0.0, reg_rmax = 0.0;
    int reg_samples = 200;
    std::uint64_t reg_seed = 1;
    reg->add_option("input", reg_input)->required();
    reg->add_option("--r-min", reg_rmin, "smallest radius")->required();
    reg->add_option("--r-max", reg_rmax, "largest radius")->required();
    reg->add_option("--samples", reg_samples, "sample budget");
    reg->add_option("--seed", reg_seed, "random seed");
    reg->add_option("--out", reg_out, "report JSON path (default stdout)");

    // jns
    auto* jns_cmd = app.add_subcommand("jns", "verify the packing bound on an instance");
    std::string jns_in, jns_generate, jns_set = "segment", jns_out;
    double jns_N = 2.0, jns_eta = 0.5;
    int jns_n = 256;
    BuildOptions jns_build;
    jns_cmd->add_option("--in", jns_in, "instance JSON {tree, alpha, N, eta}");
    jns_cmd->add_option("--generate", jns_generate, "uniform|sparse|adversarial");
    jns_cmd->add_option("--N", jns_N, "vertical-sum threshold (generated instances)");
    jns_cmd->add_option("--eta", jns_eta, "good-mass fraction (generated instances)");
    jns_cmd->add_option("--set", jns_set, "base set for generated instances");
    jns_cmd->add_option("--n", jns_n, "base set size");
    jns_cmd->add_option("--scales", jns_build.scales, "scale levels");
    jns_cmd->add_option("--seed", jns_build.seed, "random seed");
    jns_cmd->add_option("--out", jns_out, "report JSON path (default stdout)");

    // theorem-check
    auto* thm = app.add_subcommand("theorem-check",
                                   "classify normalized totals as bounded or growing");
    std::vector<std::string> thm_sets;
    std::vector<int> thm_sizes;
    std::string thm_gens = "2..5", thm_out, thm_csv;
    BuildOptions thm_build;
    std::string thm_estimator = "mc";
    std::int64_t thm_cutoff = 300, thm_samples = 100000;
    thm->add_option("--sets", thm_sets,
                    "subset of segment,circle,lipschitz-0.5,lipschitz-1,lipschitz-2,bpli,cantor")
        ->delimiter(',');
    thm->add_option("--sizes", thm_sizes, "size ladder for curve sets")->delimiter(',');
    thm->add_option("--gens", thm_gens, "cantor generation range lo..hi");
    thm->add_option("--seed", thm_build.seed, "root seed");
    thm->add_option("--scales", thm_build.scales, "scale levels (default auto)");
    thm->add_option("--estimator", thm_estimator, "exact|mc")
        ->check(CLI::IsMember({"exact", "mc"}));
    thm->add_option("--exact-cutoff", thm_cutoff, "largest member count summed exactly");
    thm->add_option("--mc-samples", thm_samples, "Monte Carlo triples per large cube");
    thm->add_option("--out", thm_out, "summary JSON path (default stdout)");
    thm->add_option("--scales-csv", thm_csv, "ladder CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (gen->parsed())
            return run_generate(gen_kind, gen_count, gen_lipschitz, gen_angle, gen_theta, gen_seed,
                                gen_out);

        if (cubes_cmd->parsed()) {
            if (cubes_input.empty()) throw std::invalid_argument("cubes: missing input CSV");
            MetricMeasureSpace space = read_point_cloud_csv(cubes_input);
            Filtration f = build_tree(space, cubes_build);
            write_text(cubes_out, cube_dump(f).dump(2));
            return report_violations(validate_filtration(space, f));
        }

        if (an->parsed()) {
            MetricMeasureSpace space = [&] {
                if (!an_matrix.empty()) {
                    if (an_weights.empty())
                        throw std::invalid_argument("--matrix requires --weights");
                    return read_distance_matrix_csv(an_matrix, an_weights);
                }
                if (an_input.empty()) throw std::invalid_argument("analyze: missing input CSV");
                return read_point_cloud_csv(an_input);
            }();
            EstimatorConfig est =
                make_estimator(an_estimator, an_cutoff, an_samples, an_repeats, an_build.seed);
            NetHierarchy hierarchy;
            Filtration f = build_tree(space, an_build, &hierarchy);
            int validation = report_violations(validate_filtration(space, f));
            CarlesonReport report;
            if (an_form == "balls") {
                BallFamily family = multiresolution_balls(hierarchy, an_A);
                double r = an_r > 0.0 ? an_r : space.diameter() / 2.0;
                report = carleson_sum_balls(space, family, an_x, r, est);
            } else {
                report = carleson_sum_cubes(space, f, f.root, est);
            }
            nlohmann::json out_json = report.to_json();
            if (!an_etilde.empty()) {
                std::vector<int> labels = read_labels(an_etilde);
                if (static_cast<int>(labels.size()) != space.size())
                    throw std::invalid_argument("label count does not match the point count");
                std::vector<int> etilde;
                for (int i = 0; i < space.size(); ++i)
                    if (labels[i] != 0) etilde.push_back(i);
                if (etilde.empty()) throw std::invalid_argument("reference set is empty");
                std::vector<int> everything(space.size());
                for (int i = 0; i < space.size(); ++i) everything[i] = i;
                double dist_sum = dist_carleson_sum(space, everything, etilde, f, f.root);
                double max_ratio = 0.0;
                for (const Cube& q : f.cubes) {
                    bool meets = false;
                    for (int m : q.members)
                        if (labels[m] != 0) { meets = true; break; }
                    if (!meets) continue;
                    auto d = approx_decomposition_check(space, q, etilde, an_A_prime, est);
                    max_ratio = std::max(max_ratio, d.ratio);
                }
                out_json["reference_set"] = {
                    {"a_prime", an_A_prime},
                    {"dist_carleson_root", dist_sum},
                    {"dist_carleson_root_normalized", dist_sum / f.cubes[f.root].nominal_diam},
                    {"max_decomposition_ratio", max_ratio}};
            }
            write_text(an_out, out_json.dump(2));
            if (!an_scales_csv.empty()) report.write_scales_csv(an_scales_csv);
            return validation;
        }

        if (reg->parsed()) {
            MetricMeasureSpace space = read_point_cloud_csv(reg_input);
            RegularityReport rep =
                space.check_ahlfors_regularity(reg_rmin, reg_rmax, reg_samples, reg_seed);
            nlohmann::json samples = nlohmann::json::array();
            for (const auto& s : rep.samples)
                samples.push_back({{"point", s.point}, {"radius", s.radius}, {"ratio", s.ratio}});
            nlohmann::json j = {{"ratio_min", rep.ratio_min},
                                {"ratio_max", rep.ratio_max},
                                {"r_min", rep.r_min},
                                {"r_max", rep.r_max},
                                {"samples", samples}};
            write_text(reg_out, j.dump(2));
            return kExitOk;
        }

        if (jns_cmd->parsed()) {
            JNSInstance inst = [&] {
                if (!jns_in.empty()) {
                    std::ifstream in(jns_in);
                    if (!in) throw std::invalid_argument("cannot open " + jns_in);
                    nlohmann::json j;
                    in >> j;
                    return JNSInstance::from_json(j);
                }
                if (jns_generate.empty())
                    throw std::invalid_argument("jns: need --in or --generate");
                MetricMeasureSpace space = [&] {
                    if (jns_set == "segment") return gen_segment(jns_n);
                    if (jns_set == "circle") return gen_circle(jns_n);
                    if (jns_set == "cantor") return gen_four_corner_cantor(jns_n);
                    throw std::invalid_argument("unknown base set: " + jns_set);
                }();
                Filtration f = build_tree(space, jns_build);
                return generate_instance(JnsTree::from_filtration(f),
                                         jns_style_from_string(jns_generate), jns_N, jns_eta,
                                         jns_build.seed);
            }();
            JnsReport report = verify_jns(inst);
            write_text(jns_out, report.to_json().dump(2));
            return report.pass ? kExitOk : kExitValidation;
        }

        if (thm->parsed()) {
            TheoremCheckConfig cfg;
            if (thm->count("--sets")) {
                cfg.sets.clear();
                for (const auto& s : thm_sets)
                    if (!s.empty()) cfg.sets.push_back(s);
            }
            if (!thm_sizes.empty()) cfg.sizes = thm_sizes;
            auto dots = thm_gens.find("..");
            if (dots == std::string::npos)
                throw std::invalid_argument("--gens expects lo..hi");
            cfg.cantor_gen_lo = std::stoi(thm_gens.substr(0, dots));
            cfg.cantor_gen_hi = std::stoi(thm_gens.substr(dots + 2));
            cfg.seed = thm_build.seed;
            cfg.scales = thm_build.scales;
            cfg.estimator = make_estimator(thm_estimator, thm_cutoff, thm_samples, 1,
                                           thm_build.seed);
            TheoremSummary summary = theorem_check(cfg);
            write_text(thm_out, summary.to_json().dump(2));
            if (!thm_csv.empty()) {
                std::ofstream csv(thm_csv);
                if (!csv) throw std::runtime_error("cannot write " + thm_csv);
                csv << "set,size,ratio,sup_ratio,classification\n";
                csv.precision(17);
                for (const auto& s : summary.sets)
                    for (std::size_t i = 0; i < s.sizes.size(); ++i)
                        csv << s.name << "," << s.sizes[i] << "," << s.ratios[i] << ","
                            << s.sup_ratios[i] << "," << s.classification << "\n";
            }
            return kExitOk;
        }
    } catch (const CsvParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
