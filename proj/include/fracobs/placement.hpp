#pragma once

// Minimal dedicated sensor placement for structural observability at horizon K.
//
// A placement J is accepted when, on the union pattern Gbar = G_0 ∨ ... ∨ G_K,
//   (i)  every state reaches a sensor-bearing state, which is the same as every
//        non-bottom-linked SCC of D(Gbar) reaching one, and
//   (ii) the bipartite graph of [Gbar^T | I_n^J] has a matching of size n.
//
// The placement itself runs a minimum-weight maximum matching over
// [Gbar^T | S], where column p of S marks the members of the p-th
// non-bottom-linked SCC. Gbar^T edges cost 0, S edges cost 1.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracobs/errors.hpp"
#include "fracobs/matching.hpp"
#include "fracobs/pattern.hpp"
#include "fracobs/struct_graph.hpp"

namespace fracobs {

/// Sensor indices (0-based states) split by how Algorithm 1 found them.
struct SensorSet {
    std::vector<std::size_t> j_prime;  // matched through an S column
    std::vector<std::size_t> j_double; // left unmatched by the matching
    std::vector<std::size_t> j_triple; // one per uncovered non-bottom-linked SCC

    std::vector<std::size_t> all() const {
        std::vector<std::size_t> out;
        out.insert(out.end(), j_prime.begin(), j_prime.end());
        out.insert(out.end(), j_double.begin(), j_double.end());
        out.insert(out.end(), j_triple.begin(), j_triple.end());
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
    std::size_t size() const { return all().size(); }
};

struct Certificate {
    bool condition_i = false;  // no non-accessible state
    bool condition_ii = false; // matching of size n
    std::vector<std::size_t> non_accessible;
    std::size_t matching_size = 0;
    std::size_t deficiency = 0; // n - matching_size

    bool observable() const noexcept { return condition_i && condition_ii; }
};

struct PlacementOptions {
    /// Add a J''' sensor for every uncovered non-bottom-linked SCC, even one that already holds a J'' sensor.
    bool strict_j3 = false;
    /// Tail caps for integer orders; empty means every tail term is generic.
    TailCaps caps;
};

struct PlacementReport {
    SensorSet sensors;
    std::size_t horizon = 0;
    Pattern g_union;
    Condensation condensation;
    std::size_t beta = 0;
    std::size_t matching_cardinality = 0;
    std::int64_t matching_weight = 0;
    std::vector<std::size_t> covered_sccs; // S-column indices matched by M'
    Certificate certificate;
};

/// n x beta; column p holds the members of the p-th non-bottom-linked SCC (ordered by smallest member).
inline Pattern build_s_pattern(const Condensation& cond) {
    const std::size_t n = cond.scc_of.size();
    Pattern s(n, cond.beta());
    for (std::size_t p = 0; p < cond.beta(); ++p)
        for (auto v : cond.sccs[cond.non_bottom_linked[p]]) s.set(v, p);
    return s;
}

/// Columns of the identity selected by `sensors`, as an n x |J| pattern.
inline Pattern sensor_columns(std::span<const std::size_t> sensors, std::size_t n) {
    Pattern p(n, sensors.size());
    for (std::size_t t = 0; t < sensors.size(); ++t) {
        if (sensors[t] >= n)
            throw DimensionError("sensor index " + std::to_string(sensors[t] + 1) + " outside 1.." + std::to_string(n));
        p.set(sensors[t], t);
    }
    return p;
}

/// Checks both conditions against an already computed union pattern.
inline Certificate verify_union(const Pattern& g_union, std::span<const std::size_t> sensors) {
    const std::size_t n = g_union.rows();
    Certificate cert;
    cert.non_accessible = non_accessible_states(g_union, sensors);
    cert.condition_i = cert.non_accessible.empty();
    cert.matching_size = generic_rank(g_union.transposed(), sensor_columns(sensors, n));
    cert.deficiency = n - cert.matching_size;
    cert.condition_ii = cert.matching_size == n;
    return cert;
}

inline Certificate verify(const Pattern& abar, std::size_t horizon, std::span<const std::size_t> sensors,
                          const TailCaps& caps = {}) {
    return verify_union(structural_g_union(abar, horizon, caps), sensors);
}

inline PlacementReport minimal_sensors(const Pattern& abar, std::size_t horizon, const PlacementOptions& opts = {}) {
    if (!abar.square()) throw DimensionError("minimal_sensors: pattern must be square");
    const std::size_t n = abar.rows();

    PlacementReport rep;
    rep.horizon = horizon;
    rep.g_union = structural_g_union(abar, horizon, opts.caps);
    rep.condensation = condense(rep.g_union);
    rep.beta = rep.condensation.beta();

    // Rows are states; columns 0..n-1 the merged G-columns, n..n+beta-1 the S columns.
    WeightedBipartite bip(n, n + rep.beta);
    const Pattern successors = rep.g_union.transposed();
    for (std::size_t r = 0; r < n; ++r)
        for (auto c : successors.row_indices(r)) bip.add_edge(r, c, 0);
    const Pattern s = build_s_pattern(rep.condensation);
    for (std::size_t r = 0; r < n; ++r)
        for (auto p : s.row_indices(r)) bip.add_edge(r, n + p, 1);

    const Matching m = min_weight_max_matching(bip);
    rep.matching_cardinality = m.cardinality();
    rep.matching_weight = m.total_weight;

    std::vector<bool> matched(n, false), in_sensor(n, false);
    for (auto [r, c] : m.pairs) {
        matched[r] = true;
        if (c >= n) {
            rep.sensors.j_prime.push_back(r);
            rep.covered_sccs.push_back(c - n);
            in_sensor[r] = true;
        }
    }
    std::sort(rep.covered_sccs.begin(), rep.covered_sccs.end());
    for (std::size_t r = 0; r < n; ++r)
        if (!matched[r]) {
            rep.sensors.j_double.push_back(r);
            in_sensor[r] = true;
        }

    for (std::size_t p = 0; p < rep.beta; ++p) {
        if (std::binary_search(rep.covered_sccs.begin(), rep.covered_sccs.end(), p)) continue;
        const auto& members = rep.condensation.sccs[rep.condensation.non_bottom_linked[p]];
        const bool already = std::any_of(members.begin(), members.end(), [&](std::size_t v) { return in_sensor[v]; });
        if (already && !opts.strict_j3) continue;
        const std::size_t pick = members.front();
        if (!in_sensor[pick]) {
            rep.sensors.j_triple.push_back(pick);
            in_sensor[pick] = true;
        }
    }
    std::sort(rep.sensors.j_triple.begin(), rep.sensors.j_triple.end());

    rep.certificate = verify_union(rep.g_union, rep.sensors.all());
    if (!rep.certificate.observable())
        throw std::logic_error("minimal_sensors: produced a placement that fails its own certificate");
    return rep;
}

} // namespace fracobs
