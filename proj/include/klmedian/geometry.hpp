#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "klmedian/errors.hpp"

namespace klmedian {

template <typename Scalar>
using Point = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Closed Euclidean ball B(center, radius).
template <typename Scalar>
struct Ball {
    Point<Scalar> center;
    Scalar radius = Scalar(0);
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    return m.array().isFinite().all();
}

/// Strict weak ordering on points of equal dimension, coordinate by coordinate.
template <typename DerivedA, typename DerivedB>
bool lexicographic_less(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (b[i] < a[i]) return false;
    }
    return false;
}

struct LexicographicLess {
    template <typename Scalar>
    bool operator()(const Point<Scalar>& a, const Point<Scalar>& b) const {
        return lexicographic_less(a, b);
    }
};

/// The r-grid-point of p: every coordinate floored to a multiple of r.
/// Cells are half-open boxes [i*r, (i+1)*r), so -0.1 lands in cell -1.
template <typename Derived>
Point<typename Derived::Scalar> grid_point(const Eigen::MatrixBase<Derived>& p,
                                           typename Derived::Scalar r) {
    using Scalar = typename Derived::Scalar;
    if (!(r > Scalar(0)) || !std::isfinite(r)) throw InvalidInput("grid_point: cell width must be positive");
    if (!all_finite(p)) throw InvalidInput("grid_point: non-finite coordinate");
    Point<Scalar> g(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        // The quotient can round across an integer; settle the cell on the products.
        Scalar k = std::floor(p[i] / r);
        if (k * r > p[i]) k -= Scalar(1);
        else if ((k + Scalar(1)) * r <= p[i]) k += Scalar(1);
        g[i] = k * r;
    }
    return g;
}

/// Upper bound on the number of grid cells a ball of this radius can touch, (ceil(2R/r)+1)^d.
template <typename Scalar>
double grid_cover_bound(Scalar radius, Scalar r, Eigen::Index dim) {
    const double per_axis = std::ceil(2.0 * double(radius) / double(r)) + 1.0;
    return std::pow(per_axis, double(dim));
}

/// All grid points G(q, r) for q in the closed ball b, sorted lexicographically.
///
/// Enumerates the integer cells in the ball's bounding box and keeps those whose
/// half-open box meets the closed ball. A cell touching the ball only along its
/// excluded upper faces does not meet it. Throws CapacityError when the bounding
/// box holds more than `cap` cells.
template <typename Scalar>
std::vector<Point<Scalar>> grid_cover_ball(const Ball<Scalar>& b, Scalar r, double cap = 1e8) {
    if (!(r > Scalar(0)) || !std::isfinite(r)) throw InvalidInput("grid_cover_ball: cell width must be positive");
    if (!(b.radius >= Scalar(0)) || !std::isfinite(b.radius)) throw InvalidInput("grid_cover_ball: radius must be non-negative");
    if (!all_finite(b.center)) throw InvalidInput("grid_cover_ball: non-finite center");

    const Eigen::Index d = b.center.size();
    std::vector<long long> lo(d), hi(d);
    double box_cells = 1.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        lo[i] = static_cast<long long>(std::floor((b.center[i] - b.radius) / r));
        hi[i] = static_cast<long long>(std::floor((b.center[i] + b.radius) / r));
        box_cells *= double(hi[i] - lo[i] + 1);
    }
    if (box_cells > cap) throw CapacityError("grid_cover_ball: cell count", box_cells, cap);
    // The quotients above may round across a cell boundary; the exact test below rejects the extras.
    for (Eigen::Index i = 0; i < d; ++i) {
        --lo[i];
        ++hi[i];
    }

    const Scalar r2 = b.radius * b.radius;
    std::vector<Point<Scalar>> out;
    std::vector<long long> idx(lo);
    while (true) {
        Scalar dist2(0);
        bool open_face = false;
        for (Eigen::Index i = 0; i < d; ++i) {
            const Scalar cell_lo = Scalar(idx[i]) * r;
            const Scalar cell_hi = Scalar(idx[i] + 1) * r;
            const Scalar c = b.center[i];
            Scalar gap(0);
            if (c < cell_lo) {
                gap = cell_lo - c;
            } else if (c >= cell_hi) {
                gap = c - cell_hi;
                open_face = true;
            }
            dist2 += gap * gap;
        }
        if (open_face ? dist2 < r2 : dist2 <= r2) {
            Point<Scalar> g(d);
            for (Eigen::Index i = 0; i < d; ++i) g[i] = Scalar(idx[i]) * r;
            out.push_back(std::move(g));
        }
        // odometer increment, last axis fastest
        Eigen::Index axis = d - 1;
        while (axis >= 0) {
            if (++idx[axis] <= hi[axis]) break;
            idx[axis] = lo[axis];
            --axis;
        }
        if (axis < 0) break;
    }
    // The odometer already yields lexicographic order.
    return out;
}

}  // namespace klmedian
