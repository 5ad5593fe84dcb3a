#pragma once

// Brute-force and randomized references for the test suites. Nothing here
// shares code paths with the engines it checks beyond the data types and the
// certificate evaluation used to define a valid placement.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracobs/errors.hpp"
#include "fracobs/frac_core.hpp"
#include "fracobs/matching.hpp"
#include "fracobs/pattern.hpp"
#include "fracobs/placement.hpp"
#include "fracobs/random.hpp"
#include "fracobs/struct_graph.hpp"

namespace fracobs::oracle {

inline constexpr std::size_t kMaxExhaustiveStates = 16;
inline constexpr std::size_t kMaxEnumerationRows = 8;

struct RealizationConfig {
    double magnitude_lo = 0.5; // |value| drawn uniformly from [lo, hi], sign fair
    double magnitude_hi = 1.5;
    double alpha_lo = 0.9;
    double alpha_hi = 1.3;
    std::uint64_t seed = 0;

    void validate() const {
        if (!std::isfinite(magnitude_lo) || !std::isfinite(magnitude_hi) || !(magnitude_lo > 0.0) ||
            magnitude_hi < magnitude_lo)
            throw DomainError("RealizationConfig: magnitude range must be finite with 0 < lo <= hi");
        if (!std::isfinite(alpha_lo) || !std::isfinite(alpha_hi) || !(alpha_lo > 0.0) || alpha_hi <= alpha_lo)
            throw DomainError("RealizationConfig: alpha range must be finite with 0 < lo < hi");
    }
};

/// Independent draws on the support of `abar`; exact zeros elsewhere.
inline Matrix random_realization(const Pattern& abar, const RealizationConfig& cfg, Rng& rng) {
    cfg.validate();
    Matrix a = Matrix::Zero(static_cast<Eigen::Index>(abar.rows()), static_cast<Eigen::Index>(abar.cols()));
    for (auto [r, c] : abar.entries()) {
        const double mag = rng.uniform(cfg.magnitude_lo, cfg.magnitude_hi);
        a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rng.coin() ? mag : -mag;
    }
    return a;
}

inline Matrix random_realization(const Pattern& abar, const RealizationConfig& cfg) {
    Rng rng(cfg.seed);
    return random_realization(abar, cfg, rng);
}

/// n orders from the configured band, integers rejected.
inline std::vector<double> random_alpha(std::size_t n, const RealizationConfig& cfg, Rng& rng) {
    cfg.validate();
    std::vector<double> alpha(n);
    for (auto& a : alpha) {
        do {
            a = rng.uniform(cfg.alpha_lo, cfg.alpha_hi);
        } while (std::floor(a) == a);
    }
    return alpha;
}

struct MinPlacement {
    std::size_t min_size = 0;
    std::vector<std::size_t> witness; // lexicographically first passing set of that size
};

/// Smallest J passing verify(), by increasing-size subset enumeration up to `cap` sensors.
inline std::optional<MinPlacement> exhaustive_min_placement(const Pattern& abar, std::size_t horizon, std::size_t cap,
                                                            const TailCaps& caps = {}) {
    if (!abar.square()) throw DimensionError("exhaustive_min_placement: pattern must be square");
    const std::size_t n = abar.rows();
    if (n > kMaxExhaustiveStates)
        throw CapacityError("exhaustive_min_placement: n = " + std::to_string(n) + " exceeds " +
                            std::to_string(kMaxExhaustiveStates));
    const Pattern g_union = structural_g_union(abar, horizon, caps);
    for (std::size_t size = 0; size <= std::min(cap, n); ++size) {
        std::vector<std::size_t> pick(size);
        for (std::size_t i = 0; i < size; ++i) pick[i] = i;
        while (true) {
            if (verify_union(g_union, pick).observable()) return MinPlacement{size, pick};
            // next combination in lexicographic order
            std::size_t i = size;
            while (i > 0 && pick[i - 1] == n - size + (i - 1)) --i;
            if (i == 0) break;
            ++pick[i - 1];
            for (std::size_t k = i; k < size; ++k) pick[k] = pick[k - 1] + 1;
        }
    }
    return std::nullopt;
}

struct EnumeratedMatching {
    std::vector<Entry> pairs;
    std::int64_t weight = 0;
    std::size_t cardinality() const noexcept { return pairs.size(); }
};

/// Every inclusion-maximal matching of a small graph.
inline std::vector<EnumeratedMatching> enumerate_matchings(const WeightedBipartite& b) {
    if (b.rows() > kMaxEnumerationRows)
        throw CapacityError("enumerate_matchings: more than " + std::to_string(kMaxEnumerationRows) + " rows");
    std::vector<EnumeratedMatching> out;
    std::vector<bool> col_used(b.cols(), false);
    std::vector<Entry> current;
    std::int64_t weight = 0;

    auto is_maximal = [&] {
        std::vector<bool> row_used(b.rows(), false);
        for (auto [r, c] : current) row_used[r] = true;
        for (const auto& e : b.edges())
            if (!row_used[e.row] && !col_used[e.col]) return false;
        return true;
    };

    auto rec = [&](auto&& self, std::size_t row) -> void {
        if (row == b.rows()) {
            if (is_maximal()) out.push_back({current, weight});
            return;
        }
        self(self, row + 1);
        for (auto [c, w] : b.adjacent(row)) {
            if (col_used[c]) continue;
            col_used[c] = true;
            current.emplace_back(row, c);
            weight += w;
            self(self, row + 1);
            weight -= w;
            current.pop_back();
            col_used[c] = false;
        }
    };
    rec(rec, 0);
    return out;
}

/// (maximum cardinality, least weight at that cardinality) over an enumeration.
inline std::pair<std::size_t, std::int64_t> best_of(const std::vector<EnumeratedMatching>& all) {
    std::size_t card = 0;
    std::int64_t weight = 0;
    bool first = true;
    for (const auto& m : all) {
        if (first || m.cardinality() > card || (m.cardinality() == card && m.weight < weight)) {
            card = m.cardinality();
            weight = m.weight;
            first = false;
        }
    }
    return {card, weight};
}

} // namespace fracobs::oracle
