#pragma once

// Numeric layer for discrete-time fractional-order systems
//
//   x_{k+1} = G_{k+1} x_0,   G_0 = A,   G_k = sum_{j=0}^{k-1} A_j G_{k-1-j}
//
// with A_0 = A and A_j = diag(-(-1)^{j+1} binom(alpha_i, j+1)) for j >= 1.
// A_0 is the coupling matrix itself; no diag(alpha) term is folded into it.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "fracobs/errors.hpp"

namespace fracobs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest state dimension for which G matrices are materialized densely.
inline constexpr std::size_t kMaxNumericDimension = 512;

/// Default relative tolerance for numeric_rank.
inline constexpr double kDefaultRankTol = 1e-9;

/**
 * Coupling matrix A, per-state fractional orders alpha and horizon K.
 * Immutable once built; the constructor enforces the invariants.
 */
class FracSystem {
public:
    FracSystem(Matrix a, std::vector<double> alpha, std::size_t horizon)
        : a_(std::move(a)), alpha_(std::move(alpha)), horizon_(horizon) {
        if (a_.rows() != a_.cols()) throw DimensionError("FracSystem: A must be square");
        if (a_.rows() == 0) throw DimensionError("FracSystem: empty state");
        if (alpha_.size() != static_cast<std::size_t>(a_.rows()))
            throw DimensionError("FracSystem: alpha has " + std::to_string(alpha_.size()) + " entries, expected " +
                                 std::to_string(a_.rows()));
        for (double v : alpha_)
            if (!std::isfinite(v) || v <= 0.0) throw DomainError("FracSystem: every alpha must be finite and > 0");
        if (!a_.allFinite()) throw DomainError("FracSystem: A has non-finite entries");
    }

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(a_.rows()); }
    const Matrix& coupling() const noexcept { return a_; }
    const std::vector<double>& alpha() const noexcept { return alpha_; }
    std::size_t horizon() const noexcept { return horizon_; }

private:
    Matrix a_;
    std::vector<double> alpha_;
    std::size_t horizon_;
};

/// binom(alpha, m) by the product recurrence binom(alpha, m) = binom(alpha, m-1) (alpha-m+1)/m.
inline double generalized_binomial(double alpha, std::size_t m) {
    if (!std::isfinite(alpha)) throw DomainError("generalized_binomial: non-finite alpha");
    double b = 1.0;
    for (std::size_t i = 1; i <= m; ++i) {
        b *= (alpha - static_cast<double>(i) + 1.0) / static_cast<double>(i);
        if (b == 0.0) break;
    }
    return b;
}

/// Diagonal entry of A_j for order alpha: -(-1)^{j+1} binom(alpha, j+1).
inline double gl_coefficient(double alpha, std::size_t j) {
    if (j == 0) throw DomainError("gl_coefficient: j must be >= 1");
    const double b = generalized_binomial(alpha, j + 1);
    // -(-1)^{j+1}: -1 for odd j, +1 for even j
    const double sign = (j % 2 == 1) ? -1.0 : 1.0;
    return sign * b;
}

/// Diagonal entries d(i, j) of A_j, i in [0, n), j in [1, K].
class GlCoefficients {
public:
    GlCoefficients(std::size_t n, std::size_t horizon) : n_(n), horizon_(horizon), d_(n * horizon, 0.0) {}

    std::size_t dimension() const noexcept { return n_; }
    std::size_t horizon() const noexcept { return horizon_; }

    /// j is 1-based (A_1 .. A_K).
    double operator()(std::size_t i, std::size_t j) const { return d_.at(i * horizon_ + (j - 1)); }
    double& operator()(std::size_t i, std::size_t j) { return d_.at(i * horizon_ + (j - 1)); }

private:
    std::size_t n_;
    std::size_t horizon_;
    std::vector<double> d_;
};

inline GlCoefficients build_aj(const FracSystem& sys) {
    GlCoefficients table(sys.dimension(), sys.horizon());
    for (std::size_t i = 0; i < sys.dimension(); ++i)
        for (std::size_t j = 1; j <= sys.horizon(); ++j) table(i, j) = gl_coefficient(sys.alpha()[i], j);
    return table;
}

/// G_0 .. G_K of a system, plus the A_j table they were built from.
class GSequence {
public:
    GSequence(std::vector<Matrix> g, GlCoefficients aj, Matrix a)
        : g_(std::move(g)), aj_(std::move(aj)), a_(std::move(a)) {}

    std::size_t horizon() const noexcept { return g_.size() - 1; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(a_.rows()); }
    const Matrix& operator[](std::size_t k) const { return g_.at(k); }
    const std::vector<Matrix>& matrices() const noexcept { return g_; }
    const GlCoefficients& coefficients() const noexcept { return aj_; }

    /// sum_{j=0}^{k-1} A_j G_{k-1-j} recomputed from the stored matrices (k >= 1).
    Matrix recurrence_rhs(std::size_t k) const {
        if (k == 0 || k > horizon()) throw HorizonError("recurrence_rhs: k out of range");
        Matrix s = a_ * g_[k - 1];
        for (std::size_t j = 1; j < k; ++j) {
            const Matrix& prev = g_[k - 1 - j];
            for (Eigen::Index i = 0; i < prev.rows(); ++i)
                s.row(i) += aj_(static_cast<std::size_t>(i), j) * prev.row(i);
        }
        return s;
    }

private:
    std::vector<Matrix> g_;
    GlCoefficients aj_;
    Matrix a_;
};

/// Builds G_0..G_K. O(K^2 n^2) for the diagonal tails plus O(K n^3) for the A products.
inline GSequence g_sequence(const FracSystem& sys) {
    const std::size_t horizon = sys.horizon();
    std::vector<Matrix> g;
    g.reserve(horizon + 1);
    g.push_back(sys.coupling());
    GlCoefficients aj = build_aj(sys);
    for (std::size_t k = 1; k <= horizon; ++k) {
        Matrix s = sys.coupling() * g[k - 1];
        for (std::size_t j = 1; j < k; ++j) {
            const Matrix& prev = g[k - 1 - j];
            for (Eigen::Index i = 0; i < prev.rows(); ++i)
                s.row(i) += aj(static_cast<std::size_t>(i), j) * prev.row(i);
        }
        g.push_back(std::move(s));
    }
    return GSequence(std::move(g), std::move(aj), sys.coupling());
}

/// States x_0 .. x_T with x_k = G_k x_0 for k >= 1.
struct Trajectory {
    std::vector<Vector> states;
};

inline Trajectory simulate(const GSequence& gs, const Vector& x0, std::size_t steps) {
    if (steps > gs.horizon())
        throw HorizonError("simulate: " + std::to_string(steps) + " steps requested, horizon is " +
                           std::to_string(gs.horizon()));
    if (static_cast<std::size_t>(x0.size()) != gs.dimension()) throw DimensionError("simulate: x0 has wrong length");
    Trajectory t;
    t.states.reserve(steps + 1);
    t.states.push_back(x0);
    for (std::size_t k = 1; k <= steps; ++k) t.states.push_back(gs[k] * x0);
    return t;
}

inline Trajectory simulate(const FracSystem& sys, const Vector& x0, std::size_t steps) {
    if (steps > sys.horizon())
        throw HorizonError("simulate: " + std::to_string(steps) + " steps requested, horizon is " +
                           std::to_string(sys.horizon()));
    return simulate(g_sequence(sys), x0, steps);
}

/**
 * Vertical stack [C G_0; C G_1; ...; C G_K].
 *
 * A sequence with horizon K holds K+1 blocks, which is O_{K+1} when the
 * stack is indexed by its number of blocks.
 */
inline Matrix observability_matrix(const Matrix& c, const GSequence& gs) {
    if (static_cast<std::size_t>(c.cols()) != gs.dimension())
        throw DimensionError("observability_matrix: C has " + std::to_string(c.cols()) + " columns, expected " +
                             std::to_string(gs.dimension()));
    const Eigen::Index p = c.rows();
    Matrix o(p * static_cast<Eigen::Index>(gs.horizon() + 1), c.cols());
    for (std::size_t k = 0; k <= gs.horizon(); ++k) o.middleRows(static_cast<Eigen::Index>(k) * p, p) = c * gs[k];
    return o;
}

/// Singular values above tol * sigma_max. Empty matrices have rank 0.
inline std::size_t numeric_rank(const Matrix& m, double tol = kDefaultRankTol) {
    if (!(tol > 0.0)) throw DomainError("numeric_rank: tol must be > 0");
    if (m.size() == 0) return 0;
    Eigen::BDCSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol * s(0)) ++r;
    return r;
}

/// Rows of the identity selected by the 0-based state indices in `sensors`.
inline Matrix selector_matrix(std::span<const std::size_t> sensors, std::size_t n) {
    Matrix c = Matrix::Zero(static_cast<Eigen::Index>(sensors.size()), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < sensors.size(); ++r) {
        if (sensors[r] >= n) throw DimensionError("sensor index " + std::to_string(sensors[r]) + " out of range");
        c(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(sensors[r])) = 1.0;
    }
    return c;
}

/**
 * Realization-level observability test.
 *
 * Stacks the direct measurement C x_0 on top of [C G_0; ...; C G_K], scales
 * every nonzero row to unit length (rank-preserving, keeps the late G_k blocks
 * from swamping C) and compares numeric_rank with n.
 */
inline bool is_observable_numeric(const GSequence& gs, std::span<const std::size_t> sensors,
                                  double tol = kDefaultRankTol) {
    const std::size_t n = gs.dimension();
    const Matrix c = selector_matrix(sensors, n);
    Matrix stacked(c.rows() * static_cast<Eigen::Index>(gs.horizon() + 2), c.cols());
    stacked.topRows(c.rows()) = c;
    stacked.bottomRows(stacked.rows() - c.rows()) = observability_matrix(c, gs);
    for (Eigen::Index r = 0; r < stacked.rows(); ++r) {
        const double norm = stacked.row(r).norm();
        if (norm > 0.0) stacked.row(r) /= norm;
    }
    return numeric_rank(stacked, tol) == n;
}

inline bool is_observable_numeric(const FracSystem& sys, std::span<const std::size_t> sensors,
                                  double tol = kDefaultRankTol) {
    return is_observable_numeric(g_sequence(sys), sensors, tol);
}

} // namespace fracobs
