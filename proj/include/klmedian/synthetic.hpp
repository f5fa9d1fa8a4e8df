#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "klmedian/curve.hpp"

namespace klmedian {

struct SyntheticConfig {
    std::size_t n = 30;
    std::size_t k = 3;
    std::size_t dim = 2;
    std::size_t complexity = 10;
    /// Prototype vertices are drawn from [0, extent]^dim.
    double extent = 10.0;
    /// Offset between cluster prototypes along the first axis.
    double separation = 50.0;
    /// Standard deviation of the per-vertex Gaussian noise.
    double spread = 0.5;
    std::uint64_t seed = 1;
};

struct SyntheticDataset {
    CurveDataset data;
    /// Generating cluster of each curve.
    std::vector<std::size_t> labels;
    std::vector<Curve> prototypes;
};

/// k noisy families of curves. Curve i belongs to cluster i mod k and is its
/// prototype plus independent noise on every vertex, then normalized.
SyntheticDataset generate_clusters(const SyntheticConfig& cfg);

}  // namespace klmedian
