#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "klmedian/curve.hpp"
#include "klmedian/errors.hpp"

namespace klmedian {

struct FrechetOptions {
    double rel_tol = 1e-9;
    double abs_tol = 0.0;
};

/// Closed sub-interval of [0, 1]; empty when lo > hi.
struct FreeInterval {
    double lo = 1.0;
    double hi = 0.0;

    bool empty() const { return lo > hi; }
    static FreeInterval none() { return {}; }
};

/// Absolute slack applied to distance comparisons in the free-space construction,
/// so that tangencies at exactly eps are decided as free.
inline constexpr double kFreeSpaceGuard = 1e-12;

namespace detail {

/// Parameters t in [0,1] with |a + t (b - a) - p| <= eps.
template <typename DP, typename DA, typename DB>
FreeInterval free_interval(const Eigen::MatrixBase<DP>& p, const Eigen::MatrixBase<DA>& a,
                           const Eigen::MatrixBase<DB>& b, double eps) {
    using Scalar = typename DP::Scalar;
    const Scalar uu = (b - a).squaredNorm();
    const Scalar start = (a - p).norm();
    const Scalar end = (b - p).norm();
    const double reach = eps + kFreeSpaceGuard;
    if (uu == Scalar(0)) {
        return start <= reach ? FreeInterval{0.0, 1.0} : FreeInterval::none();
    }
    const Scalar t_star = -(a - p).dot(b - a) / uu;
    const Scalar h = (a - p + t_star * (b - a)).norm();
    if (h > reach) return FreeInterval::none();
    const double slack = std::max(0.0, double(eps * eps - h * h));
    const double half = std::sqrt(slack / double(uu));
    FreeInterval iv{std::max(0.0, double(t_star) - half), std::min(1.0, double(t_star) + half)};
    // A free endpoint stays in the interval even when rounding pushed the other bound past it.
    if (start <= reach) {
        iv.lo = 0.0;
        iv.hi = std::max(iv.hi, 0.0);
    }
    if (end <= reach) {
        iv.hi = 1.0;
        iv.lo = std::min(iv.lo, 1.0);
    }
    return iv;
}

/// Orders curves so that (a, b) and (b, a) are processed identically.
template <typename Scalar>
bool canonical_before(const PolygonalCurve<Scalar>& a, const PolygonalCurve<Scalar>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    const auto& va = a.vertices();
    const auto& vb = b.vertices();
    for (Eigen::Index k = 0; k < va.size(); ++k) {
        if (va.data()[k] < vb.data()[k]) return true;
        if (vb.data()[k] < va.data()[k]) return false;
    }
    return false;
}

template <typename Scalar>
void require_same_dim(const PolygonalCurve<Scalar>& a, const PolygonalCurve<Scalar>& b) {
    if (a.dim() != b.dim()) throw InvalidInput("Frechet distance: curves differ in dimension");
}

/// max_j |p - tau_j|, the Frechet distance between a point and a curve.
template <typename Derived, typename Scalar>
Scalar point_curve_distance(const Eigen::MatrixBase<Derived>& p, const PolygonalCurve<Scalar>& tau) {
    return (tau.vertices().colwise() - p).colwise().norm().maxCoeff();
}

template <typename Scalar>
bool decide_ordered(const PolygonalCurve<Scalar>& sigma, const PolygonalCurve<Scalar>& tau, double eps) {
    const double reach = eps + kFreeSpaceGuard;
    if (double((sigma.front() - tau.front()).norm()) > reach) return false;
    if (double((sigma.back() - tau.back()).norm()) > reach) return false;
    if (sigma.size() == 1) return double(point_curve_distance(sigma.front(), tau)) <= reach;
    if (tau.size() == 1) return double(point_curve_distance(tau.front(), sigma)) <= reach;

    const Eigen::Index p = sigma.size();
    const Eigen::Index q = tau.size();
    // reach_left[j]: reachable part of the left edge of cell (i, j) in the current column i.
    thread_local std::vector<FreeInterval> reach_left;
    reach_left.assign(std::size_t(q - 1), FreeInterval::none());

    bool open = true;
    for (Eigen::Index j = 0; j + 1 < q; ++j) {
        const FreeInterval iv = free_interval(sigma.vertex(0), tau.vertex(j), tau.vertex(j + 1), eps);
        if (open && !iv.empty() && iv.lo == 0.0) {
            reach_left[std::size_t(j)] = iv;
            open = iv.hi == 1.0;
        } else {
            open = false;
        }
    }

    bool bottom_open = true;  // reachability along the bottom boundary j = 0
    for (Eigen::Index i = 0; i + 1 < p; ++i) {
        // Bottom edge of cell (i, 0).
        FreeInterval bottom = FreeInterval::none();
        {
            const FreeInterval iv = free_interval(tau.vertex(0), sigma.vertex(i), sigma.vertex(i + 1), eps);
            if (bottom_open && !iv.empty() && iv.lo == 0.0) {
                bottom = iv;
                bottom_open = iv.hi == 1.0;
            } else {
                bottom_open = false;
            }
        }
        for (Eigen::Index j = 0; j + 1 < q; ++j) {
            const FreeInterval left = reach_left[std::size_t(j)];
            const FreeInterval right_free = free_interval(sigma.vertex(i + 1), tau.vertex(j), tau.vertex(j + 1), eps);
            const FreeInterval top_free = free_interval(tau.vertex(j + 1), sigma.vertex(i), sigma.vertex(i + 1), eps);

            FreeInterval right = FreeInterval::none();
            if (!right_free.empty()) {
                if (!bottom.empty()) {
                    right = right_free;
                } else if (!left.empty()) {
                    right = {std::max(left.lo, right_free.lo), right_free.hi};
                }
            }
            FreeInterval top = FreeInterval::none();
            if (!top_free.empty()) {
                if (!left.empty()) {
                    top = top_free;
                } else if (!bottom.empty()) {
                    top = {std::max(bottom.lo, top_free.lo), top_free.hi};
                }
            }
            reach_left[std::size_t(j)] = right;
            bottom = top;
        }
        // `bottom` now holds the reachable top edge of cell (i, q-2).
        if (i + 2 == p && !bottom.empty() && bottom.hi == 1.0) return true;
    }
    const FreeInterval last = reach_left[std::size_t(q - 2)];
    return !last.empty() && last.hi == 1.0;
}

}  // namespace detail

/// Discrete Frechet distance over vertex couplings; an upper bound on the continuous one.
template <typename Scalar>
Scalar discrete_frechet(const PolygonalCurve<Scalar>& sigma, const PolygonalCurve<Scalar>& tau) {
    detail::require_same_dim(sigma, tau);
    const bool swap = detail::canonical_before(tau, sigma);
    const auto& a = swap ? tau : sigma;
    const auto& b = swap ? sigma : tau;
    const Eigen::Index p = a.size();
    const Eigen::Index q = b.size();
    std::vector<Scalar> prev(static_cast<std::size_t>(q)), row(static_cast<std::size_t>(q));
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < q; ++j) {
            const Scalar d = (a.vertex(i) - b.vertex(j)).norm();
            const std::size_t jj = std::size_t(j);
            Scalar reach;
            if (i == 0 && j == 0) reach = Scalar(0);
            else if (i == 0) reach = row[jj - 1];
            else if (j == 0) reach = prev[0];
            else reach = std::min({prev[jj], prev[jj - 1], row[jj - 1]});
            row[jj] = std::max(reach, d);
        }
        std::swap(prev, row);
    }
    return prev.back();
}

/// True iff d_F(sigma, tau) <= eps, by monotone reachability in the free-space diagram.
template <typename Scalar>
bool frechet_decide(const PolygonalCurve<Scalar>& sigma, const PolygonalCurve<Scalar>& tau, double eps) {
    detail::require_same_dim(sigma, tau);
    if (!(eps >= 0.0)) throw InvalidInput("frechet_decide: eps must be non-negative");
    return detail::canonical_before(tau, sigma) ? detail::decide_ordered(tau, sigma, eps)
                                                : detail::decide_ordered(sigma, tau, eps);
}

/// Lower end of the bisection bracket: the larger endpoint distance.
template <typename Scalar>
Scalar frechet_lower_bound(const PolygonalCurve<Scalar>& sigma, const PolygonalCurve<Scalar>& tau) {
    return std::max((sigma.front() - tau.front()).norm(), (sigma.back() - tau.back()).norm());
}

/// Continuous Frechet distance by bisection on frechet_decide inside
/// [frechet_lower_bound, discrete_frechet]. The result v is the smallest probed
/// value at which the decision holds, so v >= frechet_lower_bound always, and
/// |v - d_F| <= max(abs_tol, rel_tol * v).
template <typename Scalar>
double frechet_distance(const PolygonalCurve<Scalar>& sigma, const PolygonalCurve<Scalar>& tau,
                        const FrechetOptions& opts = {}) {
    detail::require_same_dim(sigma, tau);
    if (!(opts.rel_tol > 0.0)) throw InvalidInput("frechet_distance: rel_tol must be positive");
    const bool swap = detail::canonical_before(tau, sigma);
    const auto& a = swap ? tau : sigma;
    const auto& b = swap ? sigma : tau;

    double lo = double(frechet_lower_bound(a, b));
    double hi = double(discrete_frechet(a, b));
    if (a.size() == 1 || b.size() == 1 || hi <= lo) return std::max(lo, hi);
    if (detail::decide_ordered(a, b, lo)) return lo;
    while (hi - lo > std::max(opts.abs_tol, opts.rel_tol * hi)) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (detail::decide_ordered(a, b, mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

/// Free-space diagram stored in full: free and reachable intervals on the left
/// and bottom edge of every cell. Quadratic memory; frechet_decide uses a
/// streaming variant of the same propagation.
struct FreeSpaceDiagram {
    Eigen::Index rows = 0;  // |sigma|
    Eigen::Index cols = 0;  // |tau|
    // left[i][j]: edge {i} x [j, j+1], i in [0, rows), j in [0, cols-1)
    std::vector<std::vector<FreeInterval>> left_free, left_reach;
    // bottom[i][j]: edge [i, i+1] x {j}, i in [0, rows-1), j in [0, cols)
    std::vector<std::vector<FreeInterval>> bottom_free, bottom_reach;
    bool start_free = false;
    bool end_free = false;

    /// Top-right corner reachable by a monotone path from the bottom-left corner.
    bool corner_reachable() const {
        if (!start_free || !end_free) return false;
        const auto& l = left_reach[std::size_t(rows - 1)][std::size_t(cols - 2)];
        const auto& b = bottom_reach[std::size_t(rows - 2)][std::size_t(cols - 1)];
        return (!l.empty() && l.hi == 1.0) || (!b.empty() && b.hi == 1.0);
    }
};

/// Builds the full diagram for curves with at least two vertices each.
template <typename Scalar>
FreeSpaceDiagram build_free_space(const PolygonalCurve<Scalar>& sigma, const PolygonalCurve<Scalar>& tau, double eps) {
    detail::require_same_dim(sigma, tau);
    if (sigma.size() < 2 || tau.size() < 2) throw InvalidInput("build_free_space: both curves need an edge");
    FreeSpaceDiagram fs;
    const Eigen::Index p = fs.rows = sigma.size();
    const Eigen::Index q = fs.cols = tau.size();
    const double reach = eps + kFreeSpaceGuard;
    fs.start_free = double((sigma.front() - tau.front()).norm()) <= reach;
    fs.end_free = double((sigma.back() - tau.back()).norm()) <= reach;

    auto grid = [](Eigen::Index r, Eigen::Index c) {
        return std::vector<std::vector<FreeInterval>>(std::size_t(r), std::vector<FreeInterval>(std::size_t(c)));
    };
    fs.left_free = fs.left_reach = grid(p, q - 1);
    fs.bottom_free = fs.bottom_reach = grid(p - 1, q);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j + 1 < q; ++j)
            fs.left_free[std::size_t(i)][std::size_t(j)] =
                detail::free_interval(sigma.vertex(i), tau.vertex(j), tau.vertex(j + 1), eps);
    for (Eigen::Index i = 0; i + 1 < p; ++i)
        for (Eigen::Index j = 0; j < q; ++j)
            fs.bottom_free[std::size_t(i)][std::size_t(j)] =
                detail::free_interval(tau.vertex(j), sigma.vertex(i), sigma.vertex(i + 1), eps);

    if (!fs.start_free) return fs;
    for (Eigen::Index j = 0; j + 1 < q; ++j) {
        const auto& iv = fs.left_free[0][std::size_t(j)];
        if (iv.empty() || iv.lo != 0.0) break;
        fs.left_reach[0][std::size_t(j)] = iv;
        if (iv.hi != 1.0) break;
    }
    for (Eigen::Index i = 0; i + 1 < p; ++i) {
        const auto& iv = fs.bottom_free[std::size_t(i)][0];
        if (iv.empty() || iv.lo != 0.0) break;
        fs.bottom_reach[std::size_t(i)][0] = iv;
        if (iv.hi != 1.0) break;
    }
    for (Eigen::Index i = 0; i + 1 < p; ++i) {
        for (Eigen::Index j = 0; j + 1 < q; ++j) {
            const auto& left = fs.left_reach[std::size_t(i)][std::size_t(j)];
            const auto& bottom = fs.bottom_reach[std::size_t(i)][std::size_t(j)];
            const auto& rf = fs.left_free[std::size_t(i + 1)][std::size_t(j)];
            const auto& tf = fs.bottom_free[std::size_t(i)][std::size_t(j + 1)];
            auto& right = fs.left_reach[std::size_t(i + 1)][std::size_t(j)];
            auto& top = fs.bottom_reach[std::size_t(i)][std::size_t(j + 1)];
            if (!rf.empty()) {
                if (!bottom.empty()) right = rf;
                else if (!left.empty()) right = {std::max(left.lo, rf.lo), rf.hi};
            }
            if (!tf.empty()) {
                if (!left.empty()) top = tf;
                else if (!bottom.empty()) top = {std::max(bottom.lo, tf.lo), tf.hi};
            }
        }
    }
    return fs;
}

}  // namespace klmedian
