// End-to-end checks of the command-line binary: pipelines, exit codes, and
// output determinism. Runs the built executable as a subprocess.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int failures = 0;

#define EXPECT(cond, msg)                                              \
    do {                                                               \
        if (!(cond)) {                                                 \
            std::cerr << "FAIL: " << msg << " (" << #cond << ")\n";    \
            ++failures;                                                \
        }                                                              \
    } while (0)

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + std::string(CARLESON_BIN) + " " + args + " 2>&1";
    std::string output;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, "popen failed"};
    char buf[4096];
    while (std::size_t got = fread(buf, 1, sizeof buf, pipe)) output.append(buf, got);
    int status = pclose(pipe);
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, output};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main() {
    fs::path dir = CLI_TEST_DIR;
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string d = dir.string() + "/";

    // generate -> analyze pipeline on a flat set: total must be zero
    {
        auto gen = run("generate segment 128 --out " + d + "seg.csv");
        EXPECT(gen.exit_code == 0, "generate segment exits 0");
        EXPECT(fs::exists(d + "seg.csv"), "segment csv written");

        auto an = run("analyze " + d + "seg.csv --scales 6 --out " + d + "seg.json");
        EXPECT(an.exit_code == 0, "analyze segment exits 0");
        auto rep = nlohmann::json::parse(slurp(d + "seg.json"));
        EXPECT(rep["form"] == "cubes", "cube-form report");
        EXPECT(rep["total"].get<double>() <= 1e-9, "flat set has zero total");
        EXPECT(rep.contains("per_scale") && rep.contains("per_cube"), "report schema");
    }

    // malformed csv -> exit 2 with file and line in the message
    {
        std::ofstream bad(d + "bad.csv");
        bad << "0,0,1\n1,zz,1\n";
        bad.close();
        auto an = run("analyze " + d + "bad.csv");
        EXPECT(an.exit_code == 2, "malformed csv exits 2");
        EXPECT(an.output.find("bad.csv") != std::string::npos, "message names the file");
        EXPECT(an.output.find(":2") != std::string::npos, "message names the line");
    }

    // unknown flag -> exit 2
    {
        auto r = run("analyze --no-such-flag");
        EXPECT(r.exit_code == 2, "unknown flag exits 2");
    }

    // cubes dump validates and emits the documented record shape
    {
        run("generate circle 128 --out " + d + "circ.csv");
        auto cubes = run("cubes " + d + "circ.csv --scales 6 --out " + d + "cubes.json");
        EXPECT(cubes.exit_code == 0, "cubes exits 0 on a clean build");
        auto arr = nlohmann::json::parse(slurp(d + "cubes.json"));
        EXPECT(arr.is_array() && !arr.empty(), "cube dump is a nonempty array");
        const auto& q = arr.front();
        for (const char* key :
             {"id", "scale", "center", "parent", "member_count", "nominal_diam", "actual_diam",
              "mass"})
            EXPECT(q.contains(key), std::string("cube record has ") + key);
        EXPECT(q["id"].get<std::string>().rfind("k:", 0) == 0, "stable id scheme");
    }

    // analyze is bit-identical across thread counts and emits the scale csv
    {
        auto r1 = run("analyze " + d + "circ.csv --scales 6 --mc-samples 2000 --exact-cutoff 20"
                      " --seed 7 --out " + d + "a1.json --scales-csv " + d + "s1.csv",
                      "MC_THREADS=1 ");
        auto r4 = run("analyze " + d + "circ.csv --scales 6 --mc-samples 2000 --exact-cutoff 20"
                      " --seed 7 --out " + d + "a2.json --scales-csv " + d + "s2.csv",
                      "MC_THREADS=4 ");
        EXPECT(r1.exit_code == 0 && r4.exit_code == 0, "analyze runs");
        EXPECT(slurp(d + "a1.json") == slurp(d + "a2.json"), "thread-count invariant report");
        EXPECT(slurp(d + "s1.csv") == slurp(d + "s2.csv"), "thread-count invariant csv");
        std::string header = slurp(d + "s1.csv").substr(0, 31);
        EXPECT(header == "scale,count,sum,normalized_sum\n", "scale csv header");
    }

    // ball-form analyze
    {
        auto r = run("analyze " + d + "circ.csv --scales 6 --form balls --A 4 --estimator exact"
                     " --out " + d + "balls.json");
        EXPECT(r.exit_code == 0, "ball-form analyze runs");
        auto rep = nlohmann::json::parse(slurp(d + "balls.json"));
        EXPECT(rep["form"] == "balls", "ball-form report");
        EXPECT(rep["total"].get<double>() > 0.0, "circle ball total positive");
    }

    // distance-matrix ingestion with a weight sidecar
    {
        std::ofstream m(d + "dist.csv");
        m << "0,1,2\n1,0,1\n2,1,0\n";
        m.close();
        std::ofstream w(d + "w.csv");
        w << "1\n1\n1\n";
        w.close();
        auto r = run("analyze --matrix " + d + "dist.csv --weights " + d + "w.csv --scales 3"
                     " --out " + d + "m.json");
        EXPECT(r.exit_code == 0, "matrix analyze runs");

        std::ofstream m2(d + "dist_bad.csv");
        m2 << "0,1,5\n1,0,1\n5,1,0\n";  // triangle violation
        m2.close();
        auto rbad = run("analyze --matrix " + d + "dist_bad.csv --weights " + d + "w.csv");
        EXPECT(rbad.exit_code == 2, "non-metric matrix exits 2");
    }

    // regularity subcommand
    {
        auto r = run("regularity " + d + "circ.csv --r-min 0.02 --r-max 0.15 --samples 50"
                     " --seed 3 --out " + d + "reg.json");
        EXPECT(r.exit_code == 0, "regularity runs");
        auto rep = nlohmann::json::parse(slurp(d + "reg.json"));
        EXPECT(rep["ratio_min"].get<double>() > 0.0, "positive ratio bounds");
        EXPECT(rep["samples"].size() == 50, "sample budget respected");
    }

    // jns: generated instance passes; hand-built violation exits 1
    {
        auto r = run("jns --generate adversarial --set segment --n 128 --scales 6 --N 2"
                     " --eta 0.5 --seed 5 --out " + d + "jns.json");
        EXPECT(r.exit_code == 0, "generated instance verifies");
        auto rep = nlohmann::json::parse(slurp(d + "jns.json"));
        EXPECT(rep["pass"].get<bool>(), "verify pass field");
        EXPECT(rep["bound"].get<double>() == 8.0, "bound is N / eta^2");

        nlohmann::json bad = {
            {"tree",
             {{"nodes",
               {{{"id", "root"}, {"parent", nullptr}, {"mass", 1.0}, {"scale", 0}},
                {{"id", "a"}, {"parent", "root"}, {"mass", 0.5}, {"scale", 1}},
                {{"id", "b"}, {"parent", "root"}, {"mass", 0.5}, {"scale", 1}}}}}},
            {"alpha", {{"root", 9.0}, {"a", 0.0}, {"b", 0.0}}},
            {"N", 1.0},
            {"eta", 0.5}};
        std::ofstream out(d + "bad_inst.json");
        out << bad.dump();
        out.close();
        auto rbad = run("jns --in " + d + "bad_inst.json --out " + d + "bad_rep.json");
        EXPECT(rbad.exit_code == 1, "failing instance exits 1");
        auto brep = nlohmann::json::parse(slurp(d + "bad_rep.json"));
        EXPECT(!brep["hypothesis_ok"].get<bool>(), "hypothesis failure reported");
    }

    // theorem-check on a small ladder
    {
        auto r = run("theorem-check --sets segment,cantor --sizes 64,128 --gens 2..3"
                     " --out " + d + "thm.json --scales-csv " + d + "thm.csv");
        EXPECT(r.exit_code == 0, "theorem-check runs");
        auto rep = nlohmann::json::parse(slurp(d + "thm.json"));
        EXPECT(rep["sets"].size() == 2, "two sets in the summary");
        for (const auto& s : rep["sets"]) {
            if (s["name"] == "segment") EXPECT(s["classification"] == "bounded", "segment bounded");
            if (s["name"] == "cantor") EXPECT(s["classification"] == "growing", "cantor growing");
        }
        EXPECT(slurp(d + "thm.csv").rfind("set,size,ratio", 0) == 0, "ladder csv header");

        auto empty = run("theorem-check --sets \"\" --out " + d + "empty.json");
        EXPECT(empty.exit_code == 0, "empty corpus exits 0");
        auto erep = nlohmann::json::parse(slurp(d + "empty.json"));
        EXPECT(erep["sets"].empty(), "empty corpus gives an empty summary");
    }

    // bpli labels sidecar feeding the reference-set diagnostics
    {
        auto r = run("generate bpli 128 --theta 0.5 --seed 4 --out " + d + "bpli.csv");
        EXPECT(r.exit_code == 0, "bpli generate runs");
        EXPECT(fs::exists(d + "bpli.csv.labels"), "labels sidecar written");
        std::ifstream labels(d + "bpli.csv.labels");
        int count = 0, ones = 0, v;
        while (labels >> v) {
            ++count;
            ones += (v == 1);
        }
        EXPECT(count == 128, "one label per point");
        EXPECT(ones > 0 && ones < count, "both labels present");

        auto an = run("analyze " + d + "bpli.csv --etilde " + d + "bpli.csv.labels"
                      " --A-prime 1 --estimator exact --out " + d + "bpli_rep.json");
        EXPECT(an.exit_code == 0, "reference-set analyze runs");
        auto rep = nlohmann::json::parse(slurp(d + "bpli_rep.json"));
        EXPECT(rep.contains("reference_set"), "reference diagnostics emitted");
        EXPECT(rep["reference_set"]["max_decomposition_ratio"].get<double>() >= 0.0,
               "decomposition ratio present");
        EXPECT(rep["reference_set"]["dist_carleson_root_normalized"].get<double>() <= 16.0,
               "distance sum under the series bound");
    }

    if (failures == 0) std::cout << "all cli checks passed\n";
    return failures == 0 ? 0 : 1;
}
