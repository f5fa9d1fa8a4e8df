#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "klmedian/clustering.hpp"
#include "klmedian/coreset.hpp"

namespace klmedian {

struct Median1Config {
    double epsilon = 0.5;  // in (0, 1/2]
    double delta = 0.2;
    std::size_t ell = 2;
    std::uint64_t seed = 0;
    double candidate_cap = 1e10;
    /// Total grid cells over all balls of one run.
    double grid_cap = 1e8;
    std::optional<std::size_t> coreset_size;
    double c_sample = 1.0;
};

struct Median1Trace {
    double epsilon_prime = 0.0;
    double alpha_hat = 0.0;
    double delta_cost = 0.0;   // Delta, coreset cost of the bootstrap curve
    double delta_upper = 0.0;  // Delta / (1 - eps')
    double delta_lower = 0.0;  // Delta / ((1 + eps') alpha_hat)
    bool short_circuit = false;
    std::size_t coreset_entries = 0;
    std::size_t coreset_distinct = 0;
    std::size_t sample_s = 0;
    std::size_t sample_w = 0;
    Curve bootstrap;
    Curve pivot;
    std::size_t pivot_index = 0;
    double radius = 0.0;
    double cell_width = 0.0;
    std::vector<Point<double>> candidate_points;
    /// |P|^(2 ell - 2), tuples before collapsing.
    double candidate_count = 0.0;
    Curve winner;
    double winner_coreset_cost = 0.0;

    nlohmann::json to_json() const;
};

/// argmin over s in S of sum_{w in W} d_F(w, s); ties to the lowest index in S.
std::size_t rank_by_sample(const std::vector<Curve>& S, const std::vector<Curve>& W, const FrechetOptions& opts = {});

/// Same, where S and W are multisets of indices into T. W is given as a count per
/// curve of T; `dist` is the |T| x |T| distance matrix. Returns the position in S.
std::size_t rank_by_sample(const std::vector<std::size_t>& S, const std::vector<std::size_t>& w_counts,
                           const Eigen::MatrixXd& dist);

/// Union of grid covers of the balls around the pivot's vertices, sorted and
/// deduplicated. `grid_cap` bounds the total cell count over all balls.
std::vector<Point<double>> shortcut_candidates(const Curve& pivot, double radius, double cell_width,
                                               double grid_cap = 1e8);

/// Canonical candidate of a tuple of point indices: consecutive repeats are only
/// allowed as tail padding, and normalize must keep every remaining vertex.
/// Returns false for tuples that duplicate another tuple's curve.
bool canonical_candidate(const std::vector<Point<double>>& P, const std::vector<std::size_t>& tuple, Curve* out = nullptr);

/// Calls visit(curve, enumeration_index) for each distinct candidate with
/// 2 ell - 2 vertices over P, in lexicographic tuple order. Throws CapacityError
/// when |P|^(2 ell - 2) exceeds cap.
void enumerate_candidate_curves(const std::vector<Point<double>>& P, std::size_t ell, double cap,
                                const std::function<void(const Curve&, std::uint64_t)>& visit);

/// Candidate over P with 2 ell - 2 vertices minimising the weighted cost to
/// pool, optimal up to a relative 1e-8. P is sorted lexicographically; `start` must have its vertices in P;
/// it seeds the search. Deterministic for any thread count.
Curve best_candidate(const std::vector<Point<double>>& P, const std::vector<Curve>& pool,
                     const std::vector<double>& weight, std::size_t ell, const Curve& start, double* cost = nullptr,
                     const FrechetOptions& opts = {});

/// Coreset-accelerated (1, ell)-median with 2 ell - 2 vertices.
Curve one_median_5eps(const CurveDataset& T, const Median1Config& cfg, Median1Trace* trace = nullptr,
                      const FrechetOptions& opts = {});

}  // namespace klmedian
