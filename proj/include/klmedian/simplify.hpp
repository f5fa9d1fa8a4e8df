#pragma once

#include <cstddef>
#include <vector>

#include "klmedian/curve.hpp"
#include "klmedian/frechet.hpp"

namespace klmedian {

struct SimplificationResult {
    Curve curve;
    /// d_F(input, curve), up to the distance tolerance.
    double error = 0.0;
    /// Positions of the kept vertices in the input; empty when the result is not a
    /// vertex subsequence (only possible for ell = 1).
    std::vector<Eigen::Index> indices;
};

/// Vertex-restricted ell-simplification, a 4-approximate minimum-error one.
///
/// Every pair i < j of input vertices is a shortcut with error
/// d_F(segment(v_i, v_j), tau[i..j]). The minimal bottleneck path from the first
/// to the last vertex using h <= ell - 1 shortcuts is found for every h; among
/// those paths the one with the smallest actual Frechet error to tau is kept, so
/// the error never grows with ell. Ties prefer fewer vertices, then the
/// lexicographically smallest index sequence.
///
/// ell = 1 returns the best single point among the vertices and the centre of
/// their bounding box; that case is approximate and not a subsequence result in general.
SimplificationResult simplify(const Curve& tau, std::size_t ell, const FrechetOptions& opts = {});

/// Element-wise simplify, order preserved; parallel over curves.
std::vector<SimplificationResult> simplify_all(const CurveDataset& T, std::size_t ell, const FrechetOptions& opts = {});

}  // namespace klmedian
