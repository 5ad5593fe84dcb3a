#pragma once

// Bipartite matching engines.
//
// max_matching          Hopcroft-Karp, O(E sqrt(V)), weights ignored.
// min_weight_max_matching
//                       successive shortest paths over the existing edges only
//                       (absent edges are the infinite-weight ones), followed by
//                       a lexicographic normalization that walks zero-cost
//                       alternating cycles so ties resolve the same way on every
//                       platform.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracobs/errors.hpp"
#include "fracobs/pattern.hpp"

namespace fracobs {

struct BipartiteEdge {
    std::size_t row;
    std::size_t col;
    int weight;
};

/// Rows and columns with 0/1 edge weights. Missing pairs carry infinite weight.
class WeightedBipartite {
public:
    WeightedBipartite(std::size_t n_rows, std::size_t n_cols) : cols_(n_cols), adj_(n_rows) {}

    /// Every set entry of `p` becomes an edge of weight `weight`.
    static WeightedBipartite from_pattern(const Pattern& p, int weight = 0) {
        WeightedBipartite b(p.rows(), p.cols());
        for (std::size_t r = 0; r < p.rows(); ++r)
            for (auto c : p.row_indices(r)) b.add_edge(r, c, weight);
        return b;
    }

    void add_edge(std::size_t row, std::size_t col, int weight) {
        if (row >= adj_.size() || col >= cols_)
            throw DimensionError("bipartite edge (" + std::to_string(row) + ", " + std::to_string(col) +
                                 ") out of bounds");
        if (weight != 0 && weight != 1) throw DomainError("bipartite edge weights must be 0 or 1");
        auto& a = adj_[row];
        auto it = std::lower_bound(a.begin(), a.end(), col, [](const auto& e, std::size_t c) { return e.first < c; });
        if (it != a.end() && it->first == col)
            throw DomainError("duplicate bipartite edge (" + std::to_string(row) + ", " + std::to_string(col) + ")");
        a.insert(it, {col, weight});
    }

    std::size_t rows() const noexcept { return adj_.size(); }
    std::size_t cols() const noexcept { return cols_; }

    /// (col, weight) pairs of a row, ascending by column.
    std::span<const std::pair<std::size_t, int>> adjacent(std::size_t row) const { return adj_.at(row); }

    std::optional<int> weight(std::size_t row, std::size_t col) const {
        const auto& a = adj_.at(row);
        auto it = std::lower_bound(a.begin(), a.end(), col, [](const auto& e, std::size_t c) { return e.first < c; });
        if (it == a.end() || it->first != col) return std::nullopt;
        return it->second;
    }

    std::size_t edge_count() const noexcept {
        std::size_t e = 0;
        for (const auto& a : adj_) e += a.size();
        return e;
    }

    std::vector<BipartiteEdge> edges() const {
        std::vector<BipartiteEdge> out;
        for (std::size_t r = 0; r < adj_.size(); ++r)
            for (auto [c, w] : adj_[r]) out.push_back({r, c, w});
        return out;
    }

private:
    std::size_t cols_;
    std::vector<std::vector<std::pair<std::size_t, int>>> adj_;
};

struct Matching {
    std::vector<Entry> pairs; // (row, col), ascending by row
    std::int64_t total_weight = 0;

    std::size_t cardinality() const noexcept { return pairs.size(); }
};

namespace detail {

inline constexpr std::size_t kFree = static_cast<std::size_t>(-1);

inline Matching collect(const WeightedBipartite& b, const std::vector<std::size_t>& row_mate) {
    Matching m;
    for (std::size_t r = 0; r < row_mate.size(); ++r)
        if (row_mate[r] != kFree) {
            m.pairs.emplace_back(r, row_mate[r]);
            m.total_weight += *b.weight(r, row_mate[r]);
        }
    return m;
}

} // namespace detail

inline Matching max_matching(const WeightedBipartite& b) {
    using detail::kFree;
    const std::size_t nr = b.rows(), nc = b.cols();
    constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> row_mate(nr, kFree), col_mate(nc, kFree), dist(nr, kInf);

    auto bfs = [&] {
        std::queue<std::size_t> q;
        for (std::size_t r = 0; r < nr; ++r) {
            dist[r] = row_mate[r] == kFree ? 0 : kInf;
            if (dist[r] == 0) q.push(r);
        }
        bool found = false;
        while (!q.empty()) {
            const std::size_t r = q.front();
            q.pop();
            for (auto [c, w] : b.adjacent(r)) {
                const std::size_t next = col_mate[c];
                if (next == kFree) found = true;
                else if (dist[next] == kInf) {
                    dist[next] = dist[r] + 1;
                    q.push(next);
                }
            }
        }
        return found;
    };

    // Iterative layered DFS.
    std::vector<std::size_t> edge_pos(nr, 0);
    auto dfs = [&](std::size_t root) {
        std::vector<std::size_t> path{root};
        while (!path.empty()) {
            const std::size_t r = path.back();
            const auto adj = b.adjacent(r);
            bool advanced = false;
            while (edge_pos[r] < adj.size()) {
                const std::size_t c = adj[edge_pos[r]].first;
                const std::size_t next = col_mate[c];
                if (next == kFree) {
                    // augment along path
                    for (std::size_t i = path.size(); i-- > 0;) {
                        const std::size_t pr = path[i];
                        const std::size_t pc = b.adjacent(pr)[edge_pos[pr]].first;
                        row_mate[pr] = pc;
                        col_mate[pc] = pr;
                    }
                    return true;
                }
                if (dist[next] == dist[r] + 1) {
                    path.push_back(next);
                    advanced = true;
                    break;
                }
                ++edge_pos[r];
            }
            if (advanced) continue;
            dist[r] = kInf;
            path.pop_back();
            if (!path.empty()) ++edge_pos[path.back()];
        }
        return false;
    };

    while (bfs()) {
        std::fill(edge_pos.begin(), edge_pos.end(), 0);
        for (std::size_t r = 0; r < nr; ++r)
            if (row_mate[r] == kFree) dfs(r);
    }
    return detail::collect(b, row_mate);
}

/**
 * Generic rank of the horizontal concatenation [P_1 ... P_m | extra], read off as the
 * maximum matching size of its bipartite graph.
 */
inline std::size_t generic_rank(std::span<const Pattern> parts, const std::optional<Pattern>& extra = std::nullopt) {
    std::vector<Pattern> all(parts.begin(), parts.end());
    if (extra) all.push_back(*extra);
    if (all.empty()) return 0;
    return max_matching(WeightedBipartite::from_pattern(hconcat(all))).cardinality();
}

inline std::size_t generic_rank(const Pattern& p, const std::optional<Pattern>& extra = std::nullopt) {
    return generic_rank(std::span<const Pattern>(&p, 1), extra);
}

namespace detail {

// Residual network of a matching viewed as unit-capacity flow:
//   source -> row (cost 0), row -> col (edge weight), col -> sink (cost 0).
// Vertex ids: source 0, rows 1..R, cols R+1..R+C, sink R+C+1.
class MatchingFlow {
public:
    explicit MatchingFlow(const WeightedBipartite& b)
        : b_(b), nr_(b.rows()), nc_(b.cols()), row_mate_(nr_, kFree), col_mate_(nc_, kFree),
          potential_(vertex_count(), 0) {}

    std::size_t vertex_count() const noexcept { return nr_ + nc_ + 2; }
    std::size_t source() const noexcept { return 0; }
    std::size_t sink() const noexcept { return nr_ + nc_ + 1; }
    std::size_t row_id(std::size_t r) const noexcept { return 1 + r; }
    std::size_t col_id(std::size_t c) const noexcept { return 1 + nr_ + c; }
    bool is_row(std::size_t v) const noexcept { return v >= 1 && v <= nr_; }
    bool is_col(std::size_t v) const noexcept { return v > nr_ && v <= nr_ + nc_; }

    /// Calls f(to, cost) for every residual arc leaving v.
    template <class F>
    void for_each_arc(std::size_t v, F&& f) const {
        if (v == source()) {
            for (std::size_t r = 0; r < nr_; ++r)
                if (row_mate_[r] == kFree) f(row_id(r), 0);
        } else if (is_row(v)) {
            const std::size_t r = v - 1;
            if (row_mate_[r] != kFree) f(source(), 0);
            for (auto [c, w] : b_.adjacent(r))
                if (row_mate_[r] != c) f(col_id(c), w);
        } else if (is_col(v)) {
            const std::size_t c = v - 1 - nr_;
            if (col_mate_[c] == kFree) f(sink(), 0);
            else f(row_id(col_mate_[c]), -*b_.weight(col_mate_[c], c));
        } else {
            for (std::size_t c = 0; c < nc_; ++c)
                if (col_mate_[c] != kFree) f(col_id(c), 0);
        }
    }

    /// One Dijkstra round on reduced costs; augments along a cheapest source-sink path.
    bool augment() {
        constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
        const std::size_t nv = vertex_count();
        std::vector<std::int64_t> dist(nv, kInf);
        std::vector<std::size_t> parent(nv, kFree);
        using Item = std::pair<std::int64_t, std::size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist[source()] = 0;
        heap.emplace(0, source());
        while (!heap.empty()) {
            auto [d, v] = heap.top();
            heap.pop();
            if (d != dist[v]) continue;
            for_each_arc(v, [&](std::size_t to, int cost) {
                const std::int64_t nd = d + cost + potential_[v] - potential_[to];
                if (nd < dist[to]) {
                    dist[to] = nd;
                    parent[to] = v;
                    heap.emplace(nd, to);
                }
            });
        }
        if (dist[sink()] == kInf) return false;
        for (std::size_t v = 0; v < nv; ++v)
            if (dist[v] != kInf) potential_[v] += dist[v];
        std::vector<std::size_t> path;
        for (std::size_t v = sink(); v != kFree; v = parent[v]) path.push_back(v);
        std::reverse(path.begin(), path.end());
        apply(path, /*closed=*/false);
        return true;
    }

    /// Exact potentials for the current residual graph (Bellman-Ford from a virtual root).
    void refresh_potentials() {
        const std::size_t nv = vertex_count();
        std::vector<std::int64_t> dist(nv, 0);
        for (std::size_t pass = 0; pass < nv; ++pass) {
            bool changed = false;
            for (std::size_t v = 0; v < nv; ++v)
                for_each_arc(v, [&](std::size_t to, int cost) {
                    if (dist[v] + cost < dist[to]) {
                        dist[to] = dist[v] + cost;
                        changed = true;
                    }
                });
            if (!changed) break;
        }
        potential_ = std::move(dist);
    }

    /**
     * Rows in ascending order take the smallest column any optimal matching allows,
     * given the choices already fixed for earlier rows. Switches happen along
     * alternating cycles of zero reduced cost, so optimality is preserved.
     */
    void lexicographic_normalize() {
        refresh_potentials();
        std::vector<bool> locked(nr_, false);
        for (std::size_t r = 0; r < nr_; ++r) {
            const std::size_t current = row_mate_[r];
            for (auto [c, w] : b_.adjacent(r)) {
                if (current != kFree && c >= current) break;
                if (reduced(row_id(r), col_id(c), w) != 0) continue;
                auto path = tight_path(col_id(c), row_id(r), locked);
                if (!path) continue;
                std::vector<std::size_t> cycle{row_id(r)};
                cycle.insert(cycle.end(), path->begin(), path->end());
                apply(cycle, /*closed=*/true);
                break;
            }
            locked[r] = true;
        }
    }

    const std::vector<std::size_t>& row_mates() const noexcept { return row_mate_; }

private:
    std::int64_t reduced(std::size_t from, std::size_t to, int cost) const {
        return cost + potential_[from] - potential_[to];
    }

    // BFS over zero-reduced-cost residual arcs avoiding locked rows.
    std::optional<std::vector<std::size_t>> tight_path(std::size_t from, std::size_t to,
                                                       const std::vector<bool>& locked) const {
        const std::size_t nv = vertex_count();
        std::vector<std::size_t> parent(nv, kFree);
        std::vector<bool> seen(nv, false);
        std::queue<std::size_t> q;
        seen[from] = true;
        q.push(from);
        while (!q.empty()) {
            const std::size_t v = q.front();
            q.pop();
            if (v == to) break;
            for_each_arc(v, [&](std::size_t next, int cost) {
                if (seen[next] || reduced(v, next, cost) != 0) return;
                if (is_row(next) && locked[next - 1]) return;
                seen[next] = true;
                parent[next] = v;
                q.push(next);
            });
        }
        if (!seen[to]) return std::nullopt;
        std::vector<std::size_t> path;
        for (std::size_t v = to; v != kFree; v = parent[v]) path.push_back(v);
        std::reverse(path.begin(), path.end());
        return path;
    }

    // Flip every arc of a residual path (or closed cycle) in the matching.
    void apply(const std::vector<std::size_t>& walk, bool closed) {
        std::vector<std::pair<std::size_t, std::size_t>> add;
        const std::size_t arcs = closed ? walk.size() : walk.size() - 1;
        for (std::size_t i = 0; i < arcs; ++i) {
            const std::size_t u = walk[i], v = walk[(i + 1) % walk.size()];
            if (is_row(u) && is_col(v)) add.emplace_back(u - 1, v - 1 - nr_);
            else if (is_col(u) && is_row(v)) {
                const std::size_t c = u - 1 - nr_, r = v - 1;
                if (row_mate_[r] == c) row_mate_[r] = kFree;
                if (col_mate_[c] == r) col_mate_[c] = kFree;
            }
        }
        for (auto [r, c] : add) {
            row_mate_[r] = c;
            col_mate_[c] = r;
        }
    }

    const WeightedBipartite& b_;
    std::size_t nr_, nc_;
    std::vector<std::size_t> row_mate_, col_mate_;
    std::vector<std::int64_t> potential_;
};

} // namespace detail

/**
 * Among all maximum-cardinality matchings, one of least total weight. Ties are
 * broken toward the lexicographically smallest (row, col) sequence.
 */
inline Matching min_weight_max_matching(const WeightedBipartite& b) {
    detail::MatchingFlow flow(b);
    while (flow.augment()) {
    }
    flow.lexicographic_normalize();
    return detail::collect(b, flow.row_mates());
}

} // namespace fracobs
