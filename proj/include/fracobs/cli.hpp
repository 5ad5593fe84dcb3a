#pragma once

// fracplace command line: place | verify | simulate | sweep.
//
// Exit codes: 0 success (or observable), 1 not observable, 2 usage/parse error.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracobs/errors.hpp"
#include "fracobs/frac_core.hpp"
#include "fracobs/placement.hpp"
#include "fracobs/sweep.hpp"
#include "fracobs/system_file.hpp"

namespace fracobs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNotObservable = 1;
inline constexpr int kExitUsage = 2;

using json = nlohmann::ordered_json;

namespace detail {

inline std::vector<std::size_t> one_based(const std::vector<std::size_t>& v) {
    std::vector<std::size_t> out(v);
    for (auto& x : out) ++x;
    return out;
}

inline json placement_json(const PlacementReport& rep, std::size_t n, bool strict) {
    json doc;
    doc["format"] = "fracplace-placement";
    doc["version"] = 1;
    doc["n"] = n;
    doc["K"] = rep.horizon;
    doc["strict_j3"] = strict;
    doc["sensors"] = {{"all", one_based(rep.sensors.all())},
                      {"j_prime", one_based(rep.sensors.j_prime)},
                      {"j_double", one_based(rep.sensors.j_double)},
                      {"j_triple", one_based(rep.sensors.j_triple)}};
    doc["beta"] = rep.beta;
    doc["matching_cardinality"] = rep.matching_cardinality;
    doc["matching_weight"] = rep.matching_weight;
    doc["covered_sccs"] = one_based(rep.covered_sccs);
    doc["certificate"] = {{"condition_i", rep.certificate.condition_i},
                          {"condition_ii", rep.certificate.condition_ii},
                          {"non_accessible", one_based(rep.certificate.non_accessible)},
                          {"deficiency", rep.certificate.deficiency}};
    return doc;
}

inline std::string join(const std::vector<std::size_t>& v, char sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += std::to_string(v[i]);
    }
    return s;
}

/// "3", "1,3" or "@placement.json"; returns 0-based indices.
inline std::vector<std::size_t> parse_sensor_list(const std::string& spec, std::size_t n) {
    std::vector<std::size_t> one;
    if (!spec.empty() && spec.front() == '@') {
        std::ifstream in(spec.substr(1));
        if (!in) throw ParseError("cannot open placement document '" + spec.substr(1) + "'");
        json doc;
        try {
            doc = json::parse(in);
            one = doc.at("sensors").at("all").get<std::vector<std::size_t>>();
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad placement document: ") + e.what());
        }
    } else {
        std::stringstream ss(spec);
        for (std::string item; std::getline(ss, item, ',');) {
            if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
                throw ParseError("sensor list entry '" + item + "' is not a positive integer");
            one.push_back(static_cast<std::size_t>(std::stoull(item)));
        }
    }
    std::vector<std::size_t> out;
    for (auto v : one) {
        if (v < 1 || v > n)
            throw ParseError("sensor index " + std::to_string(v) + " outside 1.." + std::to_string(n));
        out.push_back(v - 1);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline std::vector<double> parse_levels(const std::string& spec) {
    std::vector<double> out;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ParseError("sparsity level '" + item + "' is not a number");
        }
    }
    return out;
}

inline Vector load_vector(const std::string& path, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::vector<double> vals;
    std::string tok;
    for (char ch; in.get(ch);) {
        if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
            if (!tok.empty()) vals.push_back(std::stod(tok));
            tok.clear();
        } else if (ch == '#') {
            std::string rest;
            std::getline(in, rest);
        } else {
            tok += ch;
        }
    }
    if (!tok.empty()) vals.push_back(std::stod(tok));
    if (vals.size() != n)
        throw ParseError("x0 has " + std::to_string(vals.size()) + " values, expected " + std::to_string(n));
    Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
    return v;
}

} // namespace detail

struct Options {
    std::string system_path;
    std::optional<std::size_t> k;
    double tol = kDefaultRankTol;
    double zero_tol = kDefaultZeroTol;
    std::uint64_t seed = 0;
    std::string sensors;
    bool strict_j3 = false;
    bool numeric_check = false;
    std::string format = "json";
    std::string x0_path;
    std::optional<std::size_t> steps;
    // sweep
    std::size_t n = 64;
    std::size_t trials = 20;
    std::string levels = "0,0.5,0.7,0.75,0.8,0.85,0.9,0.95";
    std::string base_path;
    unsigned threads = 0;
};

inline int cmd_place(const Options& o, std::ostream& out) {
    const SystemFile f = load_system_file(o.system_path);
    const std::size_t k = o.k.value_or(f.horizon.value_or(f.n));
    PlacementOptions popts;
    popts.strict_j3 = o.strict_j3;
    if (!f.alpha.empty()) popts.caps = tail_caps_from_alpha(f.alpha);
    const PlacementReport rep = minimal_sensors(f.structure(o.zero_tol), k, popts);
    if (o.format == "csv") {
        out << "state,role\n";
        for (auto v : rep.sensors.j_prime) out << v + 1 << ",j_prime\n";
        for (auto v : rep.sensors.j_double) out << v + 1 << ",j_double\n";
        for (auto v : rep.sensors.j_triple) out << v + 1 << ",j_triple\n";
    } else {
        out << detail::placement_json(rep, f.n, o.strict_j3).dump(2) << '\n';
    }
    return kExitOk;
}

inline int cmd_verify(const Options& o, std::ostream& out) {
    const SystemFile f = load_system_file(o.system_path);
    const std::size_t k = o.k.value_or(f.horizon.value_or(f.n));
    const auto sensors = detail::parse_sensor_list(o.sensors, f.n);
    const TailCaps caps = f.alpha.empty() ? TailCaps{} : tail_caps_from_alpha(f.alpha);
    const Certificate cert = verify(f.structure(o.zero_tol), k, sensors, caps);

    std::optional<bool> numeric;
    if (o.numeric_check) {
        if (f.n > kMaxNumericDimension)
            throw ParseError("numeric check refused above n = " + std::to_string(kMaxNumericDimension));
        numeric = is_observable_numeric(f.to_system(k), sensors, o.tol);
    }

    if (o.format == "csv") {
        out << "condition_i,condition_ii,non_accessible,deficiency";
        if (numeric) out << ",numeric";
        out << '\n'
            << cert.condition_i << ',' << cert.condition_ii << ','
            << detail::join(detail::one_based(cert.non_accessible), ';') << ',' << cert.deficiency;
        if (numeric) out << ',' << *numeric;
        out << '\n';
    } else {
        json doc;
        doc["format"] = "fracplace-certificate";
        doc["version"] = 1;
        doc["n"] = f.n;
        doc["K"] = k;
        doc["sensors"] = detail::one_based(sensors);
        doc["condition_i"] = cert.condition_i;
        doc["condition_ii"] = cert.condition_ii;
        doc["non_accessible"] = detail::one_based(cert.non_accessible);
        doc["matching_size"] = cert.matching_size;
        doc["deficiency"] = cert.deficiency;
        if (numeric) doc["numeric_observable"] = *numeric;
        doc["observable"] = cert.observable();
        out << doc.dump(2) << '\n';
    }
    return cert.observable() ? kExitOk : kExitNotObservable;
}

inline int cmd_simulate(const Options& o, std::ostream& out) {
    const SystemFile f = load_system_file(o.system_path);
    if (!f.numeric())
        throw ParseError("simulate needs numeric A (dense or sparse block); the file only gives a pattern");
    if (f.n > kMaxNumericDimension)
        throw ParseError("numeric mode refused above n = " + std::to_string(kMaxNumericDimension) +
                         "; use place/verify for the structural path");
    const std::size_t k = o.k.value_or(f.horizon.value_or(f.n));
    const std::size_t steps = o.steps.value_or(k);
    if (steps > k)
        throw HorizonError("--steps " + std::to_string(steps) + " exceeds the horizon K = " + std::to_string(k));
    const Vector x0 = detail::load_vector(o.x0_path, f.n);
    const Trajectory traj = simulate(f.to_system(k), x0, steps);

    out << "k";
    for (std::size_t i = 1; i <= f.n; ++i) out << ",x" << i;
    out << '\n' << std::setprecision(17);
    for (std::size_t t = 0; t < traj.states.size(); ++t) {
        out << t;
        for (Eigen::Index i = 0; i < traj.states[t].size(); ++i) out << ',' << traj.states[t](i);
        out << '\n';
    }
    return kExitOk;
}

inline int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
    SweepSpec spec;
    spec.levels = detail::parse_levels(o.levels);
    spec.trials = o.trials;
    spec.n = o.n;
    spec.horizon = o.k;
    spec.seed = o.seed;
    spec.strict_j3 = o.strict_j3;
    if (!o.base_path.empty()) {
        const SystemFile f = load_system_file(o.base_path);
        if (!f.numeric()) throw ParseError("sweep --base needs a numeric system file");
        spec.base = f.values;
    }
    const SweepResult result = run_sweep(spec, o.threads);
    for (const auto& w : result.warnings) err << "warning: " << w << '\n';
    write_sweep_csv(out, result);
    return kExitOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Minimal dedicated sensor placement for fractional-order systems", "fracplace"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("system", o.system_path, "System file")->required();
        sub->add_option("--k", o.k, "Horizon K (default: file K, else n)");
        sub->add_option("--zero-tol", o.zero_tol, "Absolute threshold for numeric -> pattern");
    };

    auto* place = app.add_subcommand("place", "Compute a minimal dedicated sensor set");
    add_common(place);
    place->add_flag("--strict-j3", o.strict_j3, "Add J''' sensors verbatim, even in SCCs already holding one");
    place->add_option("--format", o.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));

    auto* ver = app.add_subcommand("verify", "Check a sensor set for structural observability");
    add_common(ver);
    ver->add_option("--sensors", o.sensors, "Comma list of 1-based states, or @placement.json")->required();
    ver->add_flag("--numeric", o.numeric_check, "Also run the rank test on the file's numeric realization");
    ver->add_option("--tol", o.tol, "Relative rank tolerance");
    ver->add_option("--format", o.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));

    auto* sim = app.add_subcommand("simulate", "Trajectory x_k = G_k x_0 as CSV");
    add_common(sim);
    sim->add_option("--x0", o.x0_path, "File with n initial values")->required();
    sim->add_option("--steps", o.steps, "Number of steps T <= K (default K)");

    auto* sweep = app.add_subcommand("sweep", "Sensor count versus sparsity, CSV");
    sweep->add_option("--n", o.n, "State dimension of the random ensemble");
    sweep->add_option("--levels", o.levels, "Ascending comma list of sparsity fractions in [0,1)");
    sweep->add_option("--trials", o.trials, "Trials per level");
    sweep->add_option("--base", o.base_path, "Numeric system file to sparsify by magnitude");
    sweep->add_option("--k", o.k, "Horizon K (default n)");
    sweep->add_option("--seed", o.seed, "Random seed");
    sweep->add_option("--threads", o.threads, "Worker threads (0 = hardware)");
    sweep->add_flag("--strict-j3", o.strict_j3, "Verbatim J''' rule");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*place) return cmd_place(o, out);
        if (*ver) return cmd_verify(o, out);
        if (*sim) return cmd_simulate(o, out);
        if (*sweep) return cmd_sweep(o, out, err);
    } catch (const std::exception& e) {
        err << "fracplace: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"fracplace"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace fracobs::cli
