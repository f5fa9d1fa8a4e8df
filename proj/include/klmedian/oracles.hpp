#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "klmedian/clustering.hpp"

namespace klmedian {

// Brute-force reference computations, used by the verify command and the tests.

/// Smallest d_F(tau, sigma) over all curves sigma formed by 1..ell of tau's
/// vertices in order.
double exhaustive_simplification_error(const Curve& tau, std::size_t ell, const FrechetOptions& opts = {});

struct GridOracleResult {
    double cost = 0.0;
    CenterSet centers;
    /// Grid step of the exhaustive phase.
    double step = 0.0;
};

/// (k, 2)-median of a one-dimensional dataset by exhaustive search over center
/// segments with endpoints on a grid spanning the data range. The step is at
/// most rel_resolution times a proven lower bound on OPT, obtained from a coarse
/// pass. The best grid solution is then polished by a shrinking pattern search,
/// which can only lower the reported cost.
GridOracleResult grid_median_oracle(const CurveDataset& T, std::size_t k, double rel_resolution = 0.01,
                                    double subset_cap = 5e7, const FrechetOptions& opts = {});

/// max over `trials` random center sets C of d_F(tau_j, C) / cost(T, C), per curve.
/// Each center has 1..ell vertices drawn from a 32-point-per-axis grid over the
/// data bounding box widened by half its extent on each side.
std::vector<double> sensitivity_lower_bound(const CurveDataset& T, std::size_t k, std::size_t ell, std::size_t trials,
                                            std::uint64_t seed, const FrechetOptions& opts = {});

}  // namespace klmedian
