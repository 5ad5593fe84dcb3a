#pragma once

// Sensor count as a function of coupling sparsity.
//
// Each (level, trial) cell draws or derives a pattern with
// round((1 - sparsity) n^2) entries and runs minimal_sensors on it. Cells are
// independent; each one seeds its own generator from (seed, level, trial), so
// the output does not depend on the thread count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fracobs/errors.hpp"
#include "fracobs/frac_core.hpp"
#include "fracobs/placement.hpp"
#include "fracobs/random.hpp"

namespace fracobs {

struct SweepSpec {
    std::vector<double> levels; // sparsity fractions in [0, 1), ascending
    std::size_t trials = 20;
    std::size_t n = 64;                  // random ensemble size; ignored when base is set
    std::optional<Matrix> base;          // magnitude-thresholded instead of random when present
    std::optional<std::size_t> horizon;  // K; defaults to n
    std::uint64_t seed = 0;
    bool strict_j3 = false;

    std::size_t dimension() const { return base ? static_cast<std::size_t>(base->rows()) : n; }

    void validate() const {
        if (levels.empty()) throw DomainError("sweep: no sparsity levels");
        for (double s : levels)
            if (!(s >= 0.0 && s < 1.0)) throw DomainError("sweep: sparsity levels must lie in [0, 1)");
        if (!std::is_sorted(levels.begin(), levels.end())) throw DomainError("sweep: levels must be ascending");
        if (trials == 0) throw DomainError("sweep: trials must be >= 1");
        if (base && base->rows() != base->cols()) throw DimensionError("sweep: base matrix must be square");
        if (dimension() == 0) throw DomainError("sweep: dimension must be positive");
    }
};

struct SweepRow {
    double sparsity = 0.0;
    std::size_t trial = 0;
    std::size_t n_sensors = 0;
    std::size_t beta = 0;
    std::size_t horizon = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows; // level-major, trial-minor
    std::vector<std::string> warnings;
};

inline std::size_t entries_for_sparsity(double sparsity, std::size_t n) {
    return static_cast<std::size_t>(std::llround((1.0 - sparsity) * static_cast<double>(n * n)));
}

/// Keeps the `count` entries of largest magnitude; ties go to the smaller (row, col).
inline Pattern magnitude_threshold(const Matrix& a, std::size_t count) {
    struct Cand {
        double mag;
        std::size_t r, c;
    };
    std::vector<Cand> cand;
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            if (a(r, c) != 0.0)
                cand.push_back({std::abs(a(r, c)), static_cast<std::size_t>(r), static_cast<std::size_t>(c)});
    std::stable_sort(cand.begin(), cand.end(), [](const Cand& x, const Cand& y) { return x.mag > y.mag; });
    Pattern p(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()));
    for (std::size_t i = 0; i < std::min(count, cand.size()); ++i) p.set(cand[i].r, cand[i].c);
    return p;
}

inline SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 0) {
    spec.validate();
    const std::size_t n = spec.dimension();
    const std::size_t k = spec.horizon.value_or(n);
    const std::size_t cells = spec.levels.size() * spec.trials;

    SweepResult result;
    result.rows.resize(cells);
    std::size_t available = n * n;
    if (spec.base) available = static_cast<std::size_t>((spec.base->array() != 0.0).count());
    for (double s : spec.levels) {
        const std::size_t want = entries_for_sparsity(s, n);
        if (want > available) {
            std::ostringstream msg;
            msg << std::setprecision(17) << "sparsity " << s << " asks for " << want << " entries but only "
                << available << " are available; clamped";
            result.warnings.push_back(msg.str());
        }
    }

    auto run_cell = [&](std::size_t cell) {
        const std::size_t level = cell / spec.trials, trial = cell % spec.trials;
        const double s = spec.levels[level];
        const std::size_t want = std::min(entries_for_sparsity(s, n), available);
        Pattern abar;
        if (spec.base) {
            abar = magnitude_threshold(*spec.base, want);
        } else {
            Rng rng({spec.seed, static_cast<std::uint64_t>(level), static_cast<std::uint64_t>(trial)});
            abar = random_pattern_exact(n, want, rng);
        }
        PlacementOptions opts;
        opts.strict_j3 = spec.strict_j3;
        const auto rep = minimal_sensors(abar, k, opts);
        result.rows[cell] = SweepRow{s, trial, rep.sensors.size(), rep.beta, k};
    };

    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells));
    if (threads <= 1) {
        for (std::size_t c = 0; c < cells; ++c) run_cell(c);
        return result;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t c; (c = next.fetch_add(1)) < cells;) {
                try {
                    run_cell(c);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return result;
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << "sparsity,trial,n_sensors,beta,K\n";
    out << std::setprecision(17);
    for (const auto& r : result.rows)
        out << r.sparsity << ',' << r.trial << ',' << r.n_sensors << ',' << r.beta << ',' << r.horizon << '\n';
}

/// Per-level mean sensor count, in level order.
inline std::vector<double> level_means(const SweepSpec& spec, const SweepResult& result) {
    std::vector<double> means(spec.levels.size(), 0.0);
    for (std::size_t i = 0; i < result.rows.size(); ++i)
        means[i / spec.trials] += static_cast<double>(result.rows[i].n_sensors);
    for (auto& m : means) m /= static_cast<double>(spec.trials);
    return means;
}

} // namespace fracobs
