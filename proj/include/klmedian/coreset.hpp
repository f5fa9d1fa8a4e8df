#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "klmedian/clustering.hpp"
#include "klmedian/curve_io.hpp"

namespace klmedian {

/// Per-curve sensitivity bounds and the sampling distribution derived from them.
struct SensitivityProfile {
    std::vector<double> gamma;
    std::vector<double> lambda;
    /// n * lambda, an integer by construction.
    std::vector<std::uint64_t> lambda_scaled;
    std::vector<double> psi;
    double gamma_total = 0.0;
    double lambda_total = 0.0;
    std::uint64_t lambda_scaled_total = 0;
    double alpha_hat = 1.0;
    std::size_t k_prime = 0;
    /// Set when the approximation has zero cost; gamma is then uniform.
    bool degenerate = false;
    ClusteringResult source;

    std::size_t size() const { return gamma.size(); }
};

/// Closed form of sum gamma: 2k' + 2 sqrt(6 alpha k') + 3 alpha.
double total_sensitivity_bound(std::size_t k_prime, double alpha);

/// gamma_j = (1 + sqrt(2k'/(3a))) (a rho_j / D + 2 a D_i / (D |V_i|)) + (1 + sqrt(3a/(2k'))) 2 / |V_i|
/// for curve j in cell i, with a = approx.approx_factor and k' the number of
/// nonempty cells. lambda_j = ceil(n 2^ceil(log2 gamma_j)) / n, psi_j = lambda_j / Lambda.
SensitivityProfile sensitivity_profile(const CurveDataset& T, const ClusteringResult& approx);

/// Same, from the assignment and distances already stored in `approx`.
SensitivityProfile sensitivity_profile(const ClusteringResult& approx);

/// c_sample * ceil(k eps^-2 (d^2 l^2 k ln(d l m) ln(k n) ln^2(k) + ln(2/delta))), at least 1.
std::size_t coreset_sample_size(std::size_t n, std::size_t d, std::size_t m, std::size_t k, std::size_t ell,
                                double epsilon, double delta, double c_sample = 1.0);

/// Draws `sample_size` entries i.i.d. from psi. Draw t uses substream t of `seed`,
/// so the sample does not depend on thread count. Weight of a draw of curve i is
/// Lambda / (|S| lambda_i). The pool lists distinct drawn curves in first-draw order.
WeightedCurveSet sample_coreset(const CurveDataset& T, const SensitivityProfile& profile, std::size_t sample_size,
                                std::uint64_t seed);

struct CoresetConfig {
    std::size_t k = 1;
    std::size_t ell = 2;
    double epsilon = 0.1;
    double delta = 0.1;
    std::optional<std::size_t> sample_size;
    double c_sample = 1.0;
    std::uint64_t seed = 0;
    DiscreteMode mode = DiscreteMode::exhaustive;
    double subset_cap = kDefaultSubsetCap;
};

struct CoresetBuild {
    WeightedCurveSet coreset;
    SensitivityProfile profile;
};

/// The approximation the profile is computed from: the bootstrap for k = 1,
/// the simplify-then-discrete pipeline otherwise.
ClusteringResult coreset_approximation(const CurveDataset& T, const CoresetConfig& cfg, const FrechetOptions& opts = {});

CoresetBuild build_coreset(const CurveDataset& T, const CoresetConfig& cfg, const FrechetOptions& opts = {});

struct CoresetErrorStats {
    /// |pcost - cost| / cost per center set; infinity when cost = 0 < pcost.
    std::vector<double> errors;
    double max = 0.0;
    double mean = 0.0;
    std::size_t infinite = 0;
};

CoresetErrorStats coreset_error(const CurveDataset& T, const WeightedCurveSet& S, const std::vector<CenterSet>& centers,
                                const FrechetOptions& opts = {});

/// Relative error of a single pair of costs, with the zero-cost rule above.
double relative_error(double pcost, double cost);

}  // namespace klmedian
