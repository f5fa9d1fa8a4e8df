#pragma once

#include <initializer_list>
#include <vector>

#include "klmedian/curve.hpp"
#include "klmedian/random.hpp"

namespace klmedian::test {

/// Curve from a list of vertices, each a list of coordinates. Not normalized.
inline Curve make_curve(std::initializer_list<std::initializer_list<double>> verts) {
    std::vector<Point<double>> pts;
    for (const auto& v : verts) {
        Point<double> p(static_cast<Eigen::Index>(v.size()));
        Eigen::Index i = 0;
        for (double x : v) p[i++] = x;
        pts.push_back(p);
    }
    return Curve::from_points(pts);
}

inline Curve random_curve(Rng& rng, Eigen::Index d, Eigen::Index m, double lo = -5.0, double hi = 5.0) {
    VertexMatrix<double> v(d, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) v(i, j) = rng.uniform(lo, hi);
    }
    return normalize(v);
}

inline Point<double> point(std::initializer_list<double> xs) {
    Point<double> p(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) p[i++] = x;
    return p;
}

}  // namespace klmedian::test
