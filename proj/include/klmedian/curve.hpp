#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "klmedian/errors.hpp"
#include "klmedian/geometry.hpp"

namespace klmedian {

/// Vertex matrix of a curve: one column per vertex, one row per ambient dimension.
template <typename Scalar>
using VertexMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// A polygonal curve given by its vertex sequence.
///
/// Instants are implicit: every operation in this library is invariant under
/// reparameterization, so only the vertices are stored. A single vertex is the
/// degenerate constant curve.
template <typename Scalar>
class PolygonalCurve {
public:
    PolygonalCurve() = default;

    explicit PolygonalCurve(VertexMatrix<Scalar> vertices, std::string id = {})
        : vertices_(std::move(vertices)), id_(std::move(id)) {
        if (vertices_.cols() < 1) throw InvalidInput("curve needs at least one vertex");
        if (vertices_.rows() < 1) throw InvalidInput("curve dimension must be positive");
        if (!all_finite(vertices_)) throw InvalidInput("curve has a non-finite coordinate");
    }

    static PolygonalCurve from_points(const std::vector<Point<Scalar>>& pts, std::string id = {}) {
        if (pts.empty()) throw InvalidInput("curve needs at least one vertex");
        VertexMatrix<Scalar> m(pts.front().size(), Eigen::Index(pts.size()));
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (pts[j].size() != m.rows()) throw InvalidInput("curve vertices have mixed dimensions");
            m.col(Eigen::Index(j)) = pts[j];
        }
        return PolygonalCurve(std::move(m), std::move(id));
    }

    /// Complexity |tau|, the number of vertices.
    Eigen::Index size() const { return vertices_.cols(); }
    Eigen::Index dim() const { return vertices_.rows(); }

    auto vertex(Eigen::Index i) const { return vertices_.col(i); }
    auto front() const { return vertices_.col(0); }
    auto back() const { return vertices_.col(vertices_.cols() - 1); }

    const VertexMatrix<Scalar>& vertices() const { return vertices_; }
    const std::string& id() const { return id_; }
    void set_id(std::string id) { id_ = std::move(id); }

    /// Curve made of vertices [first, last] of this one.
    PolygonalCurve subcurve(Eigen::Index first, Eigen::Index last) const {
        return PolygonalCurve(vertices_.middleCols(first, last - first + 1), id_);
    }

    friend bool operator==(const PolygonalCurve& a, const PolygonalCurve& b) {
        return a.vertices_.rows() == b.vertices_.rows() && a.vertices_.cols() == b.vertices_.cols() &&
               a.vertices_ == b.vertices_;
    }

private:
    VertexMatrix<Scalar> vertices_;
    std::string id_;
};

using Curve = PolygonalCurve<double>;

inline constexpr double kDefaultCollinearityTol = 1e-12;

/// Distance from p to the closed segment [a, b].
template <typename DP, typename DA, typename DB>
typename DP::Scalar point_segment_distance(const Eigen::MatrixBase<DP>& p, const Eigen::MatrixBase<DA>& a,
                                           const Eigen::MatrixBase<DB>& b) {
    using Scalar = typename DP::Scalar;
    const auto ab = (b - a).eval();
    const Scalar len2 = ab.squaredNorm();
    if (len2 == Scalar(0)) return (p - a).norm();
    Scalar t = (p - a).dot(ab) / len2;
    t = std::clamp(t, Scalar(0), Scalar(1));
    return (p - (a + t * ab)).norm();
}

/// Drops exact consecutive duplicates, then every vertex lying within
/// `collinearity_tol * |a c|` of the segment joining its neighbours a and c.
/// Idempotent; never increases complexity.
template <typename Scalar>
PolygonalCurve<Scalar> normalize(const VertexMatrix<Scalar>& raw, Scalar collinearity_tol = Scalar(kDefaultCollinearityTol),
                                 std::string id = {}) {
    if (raw.cols() < 1) throw InvalidInput("normalize: empty vertex list");
    if (!(collinearity_tol >= Scalar(0))) throw InvalidInput("normalize: tolerance must be non-negative");
    if (!all_finite(raw)) throw InvalidInput("normalize: non-finite coordinate");

    std::vector<Eigen::Index> keep;
    keep.reserve(std::size_t(raw.cols()));
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
        if (!keep.empty() && raw.col(keep.back()) == raw.col(j)) continue;
        while (keep.size() >= 2) {
            const auto a = raw.col(keep[keep.size() - 2]);
            const auto b = raw.col(keep.back());
            const auto c = raw.col(j);
            const Scalar span = (c - a).norm();
            if (point_segment_distance(b, a, c) <= collinearity_tol * span && span > Scalar(0)) {
                keep.pop_back();
            } else {
                break;
            }
        }
        keep.push_back(j);
    }
    VertexMatrix<Scalar> out(raw.rows(), Eigen::Index(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) out.col(Eigen::Index(j)) = raw.col(keep[j]);
    return PolygonalCurve<Scalar>(std::move(out), std::move(id));
}

template <typename Scalar>
PolygonalCurve<Scalar> normalize(const PolygonalCurve<Scalar>& c, Scalar collinearity_tol = Scalar(kDefaultCollinearityTol)) {
    return normalize(c.vertices(), collinearity_tol, c.id());
}

/// Input set T: non-empty, uniform dimension.
struct CurveDataset {
    std::vector<Curve> curves;
    Eigen::Index dim = 0;
    Eigen::Index max_complexity = 0;

    CurveDataset() = default;
    explicit CurveDataset(std::vector<Curve> cs) : curves(std::move(cs)) {
        if (curves.empty()) throw InvalidInput("dataset is empty");
        dim = curves.front().dim();
        for (const auto& c : curves) {
            if (c.dim() != dim) throw InvalidInput("dataset mixes curve dimensions");
            max_complexity = std::max(max_complexity, c.size());
        }
    }

    std::size_t size() const { return curves.size(); }
    const Curve& operator[](std::size_t i) const { return curves[i]; }
};

}  // namespace klmedian
