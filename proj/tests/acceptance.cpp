// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance --only N   run criterion N (1..9)
//
// Exit status is 0 only when every selected criterion passes.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "fracobs/fracobs.hpp"
#include "fracobs/oracle.hpp"
#include "test_support.hpp"

using namespace fracobs;
using namespace fracobs::testing;
using BigFloat = boost::multiprecision::cpp_bin_float_50;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> body;
};

std::string fmt(double v, int precision = 3) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

// (-1)^j binom(alpha, j + 1) by the plain product, in 50 significant digits.
BigFloat reference_gl(double alpha, std::size_t j) {
    const BigFloat a(alpha);
    BigFloat b = 1;
    for (std::size_t i = 0; i <= j; ++i) b = b * (a - BigFloat(i)) / BigFloat(i + 1);
    return (j % 2 == 0) ? b : BigFloat(-b);
}

Outcome gl_coefficients() {
    const double alphas[] = {0.5, 0.97, 1.0, 1.28, 2.5};
    double worst = 0.0;
    std::size_t bad = 0;
    for (double alpha : alphas)
        for (std::size_t j = 1; j <= 50; ++j) {
            const double got = gl_coefficient(alpha, j);
            const BigFloat ref = reference_gl(alpha, j);
            if (alpha == 1.0) {
                bad += got != 0.0;
                continue;
            }
            const double rel = static_cast<double>(abs((BigFloat(got) - ref) / ref));
            worst = std::max(worst, rel);
            bad += !(rel <= 1e-12);
        }
    return {bad == 0, "250 coefficients, worst relative error " + fmt(worst) + ", alpha=1 exact zeros"};
}

Outcome recursion_identity() {
    Rng rng(0xC2);
    double worst = 0.0, worst_int = 0.0;
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 1 + rng.below(8), k = rng.below(11);
        const Matrix a = random_dense(n, n, rng);
        std::vector<double> alpha(n);
        for (auto& v : alpha) v = rng.uniform(0.2, 2.8);
        const auto gs = g_sequence(FracSystem(a, alpha, k));

        // Diagonal tails from the high-precision reference, products formed independently.
        for (std::size_t step = 1; step <= k; ++step) {
            Matrix rhs = a * gs[step - 1];
            for (std::size_t j = 1; j < step; ++j) {
                Vector d(static_cast<Eigen::Index>(n));
                for (std::size_t i = 0; i < n; ++i)
                    d(static_cast<Eigen::Index>(i)) = static_cast<double>(reference_gl(alpha[i], j));
                rhs += d.asDiagonal() * gs[step - 1 - j];
            }
            const double scale = std::max(rhs.norm(), std::numeric_limits<double>::min());
            worst = std::max(worst, (gs[step] - rhs).norm() / scale);
        }

        const auto integer = g_sequence(FracSystem(a, std::vector<double>(n, 1.0), k));
        Matrix power = a;
        for (std::size_t step = 0; step <= k; ++step) {
            const double scale = std::max(power.norm(), std::numeric_limits<double>::min());
            worst_int = std::max(worst_int, (integer[step] - power).norm() / scale);
            power = a * power;
        }
    }
    return {worst <= 1e-12 && worst_int <= 1e-12,
            "50 systems, worst recursion residual " + fmt(worst) + ", worst alpha=1 power residual " + fmt(worst_int)};
}

Outcome structural_union() {
    Rng rng(0xC3);
    int mismatches = 0;
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 1 + rng.below(8), k = rng.below(11);
        const Pattern p = random_pattern_bernoulli(n, rng.uniform(0.0, 0.6), rng);
        mismatches += structural_g_union(p, k) != power_union(p, k);
    }
    return {mismatches == 0, "500 patterns, " + std::to_string(mismatches) + " mismatches"};
}

Outcome matching_engines() {
    Rng rng(0xC4);
    int card_bad = 0, mwmm_bad = 0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t rows = 1 + rng.below(8), cols = 1 + rng.below(10);
        const double density = rng.uniform(0.1, 0.8);
        WeightedBipartite b(rows, cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                if (rng.uniform() < density) b.add_edge(r, c, static_cast<int>(rng.below(2)));
        const auto [card, weight] = oracle::best_of(oracle::enumerate_matchings(b));
        card_bad += max_matching(b).cardinality() != card;
        const auto m = min_weight_max_matching(b);
        mwmm_bad += m.cardinality() != card || m.total_weight != weight;
    }
    return {card_bad == 0 && mwmm_bad == 0, "200 graphs, max-matching mismatches " + std::to_string(card_bad) +
                                                ", min-weight mismatches " + std::to_string(mwmm_bad)};
}

Outcome soundness() {
    Rng rng(0xC5);
    int failures = 0;
    for (int t = 0; t < 500; ++t) {
        const auto inst = random_instance(rng, 1, 12);
        const auto rep = minimal_sensors(inst.abar, inst.horizon);
        failures += !verify(inst.abar, inst.horizon, rep.sensors.all()).observable();
    }
    return {failures == 0, "500 instances, " + std::to_string(failures) + " verify failures"};
}

Outcome minimality() {
    Rng rng(0xC6);
    PlacementOptions strict;
    strict.strict_j3 = true;
    int deviations = 0, strict_deviations = 0;
    for (int t = 0; t < 200; ++t) {
        const auto inst = random_instance(rng, 1, 10);
        const auto best = oracle::exhaustive_min_placement(inst.abar, inst.horizon, inst.abar.rows());
        if (!best) {
            ++deviations;
            continue;
        }
        deviations += minimal_sensors(inst.abar, inst.horizon).sensors.size() != best->min_size;
        strict_deviations += minimal_sensors(inst.abar, inst.horizon, strict).sensors.size() != best->min_size;
    }
    return {deviations == 0, "200 instances, " + std::to_string(deviations) + " deviations (strict rule: " +
                                 std::to_string(strict_deviations) + ", reported only)"};
}

Outcome genericity_bridge() {
    Rng rng(0xC7);
    oracle::RealizationConfig cfg;
    const double tol = 1e-9;
    int below = 0, worst = 100;
    std::size_t total_pass = 0;
    for (int t = 0; t < 50; ++t) {
        // default horizon K = n
        const auto inst = random_instance(rng, 2, 10);
        const std::size_t n = inst.abar.rows();
        const auto sensors = minimal_sensors(inst.abar, n).sensors.all();
        int pass = 0;
        for (int r = 0; r < 100; ++r) {
            const FracSystem sys(oracle::random_realization(inst.abar, cfg, rng), oracle::random_alpha(n, cfg, rng), n);
            pass += is_observable_numeric(sys, sensors, tol);
        }
        total_pass += static_cast<std::size_t>(pass);
        worst = std::min(worst, pass);
        below += pass < 95;
    }
    return {below == 0, "50 instances x 100 realizations, " + std::to_string(below) +
                            " instances below 95%, worst instance " + std::to_string(worst) + "/100, overall " +
                            fmt(static_cast<double>(total_pass) / 50.0, 4) + "%"};
}

Outcome sparsity_trend() {
    const std::size_t n = 64;
    SweepSpec spec;
    spec.n = n;
    spec.horizon = 64;
    spec.trials = 20;
    spec.seed = 0xC8;
    const double nearly_empty = 1.0 - 1.0 / static_cast<double>(n * n);
    spec.levels = {0.0, 0.75, 0.90, nearly_empty};
    const auto result = run_sweep(spec);
    const auto means = level_means(spec, result);

    std::size_t dense_ok = 0, empty_ok = 0;
    for (const auto& row : result.rows) {
        if (row.sparsity == 0.0) dense_ok += row.n_sensors == 1;
        if (row.sparsity == nearly_empty) empty_ok += row.n_sensors == n;
    }
    const bool trend = means[2] > means[1];
    return {trend && dense_ok == spec.trials && empty_ok == spec.trials,
            "mean at 0.75 = " + fmt(means[1], 4) + ", mean at 0.90 = " + fmt(means[2], 4) + "; one sensor at 0 in " +
                std::to_string(dense_ok) + "/20; n sensors at 1-1/n^2 in " + std::to_string(empty_ok) +
                "/20 (mean " + fmt(means[3], 4) + ")"};
}

int shell(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome cli_contract() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("fracplace-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string exe = FRACPLACE_EXE;
    std::ofstream(dir / "sys.txt") << "fracplace-system 1\nn 5\nalpha 0.7 0.9 1.2 1.4 0.6\n"
                                      "sparse\n2 1 0.8\n3 2 -1.1\n1 3 0.5\n4 3 1.3\n5 5 -0.4\n";
    std::ofstream(dir / "bad.txt") << "fracplace-system 1\nn 2\npattern\n3 1\n";
    const auto q = [&](const char* name) { return "'" + (dir / name).string() + "'"; };

    const int place = shell(exe + " place " + q("sys.txt") + " > " + q("placement.json") + " 2>/dev/null");
    const int verify_rc = shell(exe + " verify " + q("sys.txt") + " --sensors @" + (dir / "placement.json").string() +
                                " > /dev/null 2>&1");
    const std::string sweep = exe + " sweep --n 24 --levels 0,0.5,0.8,0.9,0.95 --trials 6 --seed 42 > ";
    const int s1 = shell(sweep + q("a.csv") + " 2>/dev/null"), s2 = shell(sweep + q("b.csv") + " 2>/dev/null");
    const std::string a = slurp(dir / "a.csv"), b = slurp(dir / "b.csv");
    const int malformed = shell(exe + " place " + q("bad.txt") + " > /dev/null 2>&1");
    fs::remove_all(dir);

    const bool ok = place == 0 && verify_rc == 0 && s1 == 0 && s2 == 0 && !a.empty() && a == b && malformed == 2;
    return {ok, "place=" + std::to_string(place) + " verify=" + std::to_string(verify_rc) + " sweep byte-identical=" +
                    (a == b && !a.empty() ? "yes" : "no") + " malformed=" + std::to_string(malformed)};
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--only" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::cerr << "usage: acceptance [--only N]\n";
            return 2;
        }
    }
    if (only < 0 || only > 9) {
        std::cerr << "criterion must be 1..9\n";
        return 2;
    }

    const std::vector<Criterion> criteria{
        {1, "GL coefficients vs 50-digit reference", 1.0, gl_coefficients},
        {2, "G_k recursion identity", 5.0, recursion_identity},
        {3, "structural union equals boolean power union", 5.0, structural_union},
        {4, "matching engines vs enumeration", 30.0, matching_engines},
        {5, "placement soundness", 60.0, soundness},
        {6, "placement minimality vs exhaustive search", 600.0, minimality},
        {7, "numeric observability of placed instances", 300.0, genericity_bridge},
        {8, "sensor count vs sparsity at n=64", 600.0, sparsity_trend},
        {9, "CLI contract", 10.0, cli_contract},
    };

    bool all = true;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.limit_seconds;
        const bool pass = o.pass && in_time;
        all = all && pass;
        std::cout << "criterion " << c.id << ": " << (pass ? "PASS" : "FAIL") << "  " << c.name << " | " << o.detail
                  << " | " << fmt(secs) << " s (limit " << c.limit_seconds << " s" << (in_time ? "" : ", exceeded")
                  << ")" << std::endl;
    }
    return all ? 0 : 1;
}
