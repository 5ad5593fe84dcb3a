#pragma once

// Structural layer: patterns, the state digraph and its condensation.
//
// Edge convention (used everywhere in this library): entry (j, k) of a square
// pattern is the digraph edge x_k -> x_j, i.e. the column index is the source.
// The observability bipartite graphs work on the transpose, where row r lists
// the successors of x_r.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fracobs/errors.hpp"
#include "fracobs/frac_core.hpp"
#include "fracobs/pattern.hpp"

namespace fracobs {

inline constexpr double kDefaultZeroTol = 1e-12;

/// Per-state bound on the number of nonzero A_j tail terms; nullopt means every A_j entry is generic.
using TailCaps = std::vector<std::optional<std::size_t>>;

/// Integer alpha_i kills A_j(i, i) for j + 1 > alpha_i, so the tail holds alpha_i - 1 terms.
inline TailCaps tail_caps_from_alpha(std::span<const double> alpha) {
    TailCaps caps(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const double a = alpha[i];
        if (std::isfinite(a) && a >= 1.0 && std::floor(a) == a) caps[i] = static_cast<std::size_t>(a) - 1;
    }
    return caps;
}

inline Pattern pattern_of(const Matrix& m, double zero_tol = kDefaultZeroTol) {
    if (zero_tol < 0.0) throw DomainError("pattern_of: zero_tol must be >= 0");
    Pattern p(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            if (std::abs(m(r, c)) > zero_tol) p.set(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    return p;
}

/**
 * Boolean prediction pat(G_0) .. pat(G_K):
 *
 *   pat(G_0) = Abar
 *   pat(G_k) = (Abar ⊙ pat(G_{k-1})) ∨ pat(G_{k-2}) ∨ ... ∨ pat(G_0)
 *
 * where row i only takes the tail terms A_j, j <= caps[i], when a cap is set.
 * Stops early once the sequence is periodic with period one.
 */
inline std::vector<Pattern> structural_g_patterns(const Pattern& abar, std::size_t horizon, const TailCaps& caps = {}) {
    if (!abar.square()) throw DimensionError("structural_g_patterns: pattern must be square");
    const std::size_t n = abar.rows();
    if (!caps.empty() && caps.size() != n) throw DimensionError("structural_g_patterns: caps length differs from n");

    std::size_t window = 0;
    bool any_generic = caps.empty();
    for (const auto& c : caps) {
        if (c) window = std::max(window, *c);
        else any_generic = true;
    }

    std::vector<Pattern> g;
    g.reserve(horizon + 1);
    g.push_back(abar);
    Pattern prefix_union(n, n); // pat(G_0) ∨ ... ∨ pat(G_{k-2})
    std::size_t stable_run = 1;
    for (std::size_t k = 1; k <= horizon; ++k) {
        if (k >= 2) prefix_union |= g[k - 2];
        if (stable_run >= window + 2 && k > window + 1) {
            g.push_back(g.back());
            continue;
        }
        Pattern next = boolean_product(abar, g[k - 1]);
        for (std::size_t i = 0; i < n; ++i) {
            const std::optional<std::size_t> cap = caps.empty() ? std::nullopt : caps[i];
            if (!cap) {
                if (any_generic) next.or_row(i, prefix_union.row_words(i));
                continue;
            }
            const std::size_t terms = std::min(k - 1, *cap);
            for (std::size_t j = 1; j <= terms; ++j) next.or_row(i, g[k - 1 - j].row_words(i));
        }
        stable_run = (next == g.back()) ? stable_run + 1 : 1;
        g.push_back(std::move(next));
    }
    return g;
}

/// pat(G_0) ∨ ... ∨ pat(G_K). With generic tails this equals Abar ∨ Abar^2 ∨ ... ∨ Abar^{K+1}.
inline Pattern structural_g_union(const Pattern& abar, std::size_t horizon, const TailCaps& caps = {}) {
    if (!abar.square()) throw DimensionError("structural_g_union: pattern must be square");
    auto blocks = structural_g_patterns(abar, horizon, caps);
    Pattern u(abar.rows(), abar.cols());
    for (const auto& b : blocks) u |= b;
    return u;
}

/// SCC decomposition of a square pattern's digraph.
struct Condensation {
    std::vector<std::size_t> scc_of;                       // state -> SCC id
    std::vector<std::vector<std::size_t>> sccs;            // members, ascending
    std::vector<std::pair<std::size_t, std::size_t>> dag_edges; // (from, to), from != to, sorted
    std::vector<std::size_t> non_bottom_linked;            // SCC ids without outgoing DAG edges, ascending

    std::size_t beta() const noexcept { return non_bottom_linked.size(); }
};

/// Iterative Tarjan, O(|V| + |E|). SCC ids are ordered by smallest member state.
inline Condensation condense(const Pattern& p) {
    if (!p.square()) throw DimensionError("condense: pattern must be square");
    const std::size_t n = p.rows();
    const Pattern succ = p.transposed(); // row k lists j with x_k -> x_j
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t k = 0; k < n; ++k) adj[k] = succ.row_indices(k);

    constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, kUnvisited), low(n, 0), raw_comp(n, kUnvisited);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::pair<std::size_t, std::size_t>> call; // (vertex, next edge position)
    std::size_t counter = 0, raw_count = 0;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) continue;
        call.emplace_back(root, 0);
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& [v, pos] = call.back();
            if (pos < adj[v].size()) {
                const std::size_t w = adj[v][pos++];
                if (index[w] == kUnvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const std::size_t done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
            if (low[done] == index[done]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    raw_comp[w] = raw_count;
                } while (w != done);
                ++raw_count;
            }
        }
    }

    // Renumber by first appearance in ascending state order.
    std::vector<std::size_t> remap(raw_count, kUnvisited);
    Condensation out;
    out.scc_of.assign(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        auto& id = remap[raw_comp[v]];
        if (id == kUnvisited) {
            id = out.sccs.size();
            out.sccs.emplace_back();
        }
        out.scc_of[v] = id;
        out.sccs[id].push_back(v);
    }

    std::vector<bool> has_out(out.sccs.size(), false);
    for (std::size_t k = 0; k < n; ++k)
        for (auto j : adj[k]) {
            const auto a = out.scc_of[k], b = out.scc_of[j];
            if (a != b) {
                out.dag_edges.emplace_back(a, b);
                has_out[a] = true;
            }
        }
    std::sort(out.dag_edges.begin(), out.dag_edges.end());
    out.dag_edges.erase(std::unique(out.dag_edges.begin(), out.dag_edges.end()), out.dag_edges.end());
    for (std::size_t s = 0; s < out.sccs.size(); ++s)
        if (!has_out[s]) out.non_bottom_linked.push_back(s);
    return out;
}

/// States with no directed path to a sensor-bearing state (reverse BFS from the sensors).
inline std::vector<std::size_t> non_accessible_states(const Pattern& p, std::span<const std::size_t> sensors) {
    if (!p.square()) throw DimensionError("non_accessible_states: pattern must be square");
    const std::size_t n = p.rows();
    std::vector<bool> reached(n, false);
    std::vector<std::size_t> queue;
    for (auto s : sensors) {
        if (s >= n) throw DimensionError("non_accessible_states: sensor index out of range");
        if (!reached[s]) {
            reached[s] = true;
            queue.push_back(s);
        }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::size_t u = queue[head];
        for (auto k : p.row_indices(u)) // predecessors: x_k -> x_u
            if (!reached[k]) {
                reached[k] = true;
                queue.push_back(k);
            }
    }
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < n; ++v)
        if (!reached[v]) out.push_back(v);
    return out;
}

} // namespace fracobs
