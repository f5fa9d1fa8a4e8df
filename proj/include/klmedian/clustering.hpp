#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "klmedian/curve.hpp"
#include "klmedian/curve_io.hpp"
#include "klmedian/frechet.hpp"

namespace klmedian {

/// k candidate median curves.
struct CenterSet {
    std::vector<Curve> centers;

    CenterSet() = default;
    explicit CenterSet(std::vector<Curve> cs) : centers(std::move(cs)) {}

    std::size_t size() const { return centers.size(); }
    const Curve& operator[](std::size_t i) const { return centers[i]; }
    /// Largest center complexity.
    Eigen::Index max_complexity() const;
};

struct ClusteringResult {
    CenterSet centers;
    /// Curve index -> center index of a nearest center, ties to the lowest index.
    std::vector<std::size_t> assignment;
    /// Frechet distance from each curve to its assigned center.
    std::vector<double> distances;
    /// Per-center cost, the sum of `distances` over its Voronoi cell.
    std::vector<double> cluster_costs;
    double total_cost = 0.0;
    /// Declared approximation factor of the algorithm that produced the centers.
    double approx_factor = 1.0;
    /// For discrete solvers, the candidate index behind each center.
    std::vector<std::size_t> center_indices;

    std::vector<std::size_t> cell_sizes() const;
};

enum class DiscreteMode { exhaustive, local_search };

DiscreteMode parse_discrete_mode(const std::string& name);
std::string to_string(DiscreteMode mode);

inline constexpr double kDefaultSubsetCap = 5e7;

/// Declared factor of the discrete solver (relative to the best k candidates).
constexpr double discrete_factor(DiscreteMode mode) { return mode == DiscreteMode::exhaustive ? 1.0 : 5.0; }

/// Factor of the simplify-then-discrete-k-median pipeline with an inner solver of factor beta:
/// cost(T,C) <= sum d(tau, tau_hat) + cost(T_hat, C) <= 4 OPT + 2 beta cost(T_hat, C*)
///           <= 4 OPT + 2 beta (4 OPT + OPT) = (4 + 10 beta) OPT.
constexpr double pipeline_factor(double inner_beta) { return 4.0 + 10.0 * inner_beta; }

/// Declared factor of one_median_bootstrap: OPT + n (OPT/n) + n 4 (OPT/n).
inline constexpr double kBootstrapFactor = 6.0;

/// |rows| x |cols| matrix of Frechet distances, filled in parallel.
Eigen::MatrixXd distance_matrix(const std::vector<Curve>& rows, const std::vector<Curve>& cols,
                                const FrechetOptions& opts = {});

double cost(const CurveDataset& T, const CenterSet& C, const FrechetOptions& opts = {});

/// sum over entries of w * min_c d_F; evaluated once per pool curve with pooled weights.
double weighted_cost(const WeightedCurveSet& S, const CenterSet& C, const FrechetOptions& opts = {});

/// Nearest-center partition of T. approx_factor is left at 1.
ClusteringResult voronoi_partition(const CurveDataset& T, const CenterSet& C, const FrechetOptions& opts = {});

/// Same, from a precomputed |T| x |C| distance matrix.
ClusteringResult voronoi_from_distances(const Eigen::MatrixXd& dist, CenterSet C);

/// Discrete k-median on a precomputed symmetric candidate distance matrix.
/// Returns the chosen candidate indices (ascending for exhaustive) and their cost.
struct DiscreteSolution {
    std::vector<std::size_t> chosen;
    double cost = 0.0;
};
DiscreteSolution discrete_kmedian_indices(const Eigen::MatrixXd& dist, std::size_t k, DiscreteMode mode,
                                          double subset_cap = kDefaultSubsetCap);

/// k centers chosen among the candidates. Exhaustive mode is optimal over all
/// C(n,k) subsets (ties to the lexicographically smallest); local search uses
/// best-improvement single swaps until none improves by more than a 1e-4 fraction.
ClusteringResult discrete_kmedian(const CurveDataset& candidates, std::size_t k, DiscreteMode mode,
                                  double subset_cap = kDefaultSubsetCap, const FrechetOptions& opts = {});

struct ConstantFactorConfig {
    std::size_t k = 1;
    std::size_t ell = 2;
    double delta = 0.1;  // accepted for interface parity; the solvers here are deterministic
    std::uint64_t seed = 0;
    DiscreteMode mode = DiscreteMode::exhaustive;
    double subset_cap = kDefaultSubsetCap;
};

/// Simplify every curve to ell vertices, solve discrete k-median over the
/// simplifications, and partition T by the chosen centers.
/// approx_factor = pipeline_factor(discrete_factor(mode)).
ClusteringResult kl_median_constant_factor(const CurveDataset& T, const ConstantFactorConfig& cfg,
                                           const FrechetOptions& opts = {});

/// The ell-simplification of an input curve that minimizes cost over T
/// (ties to the lowest index); approx_factor = kBootstrapFactor.
ClusteringResult one_median_bootstrap(const CurveDataset& T, std::size_t ell, const FrechetOptions& opts = {});

}  // namespace klmedian
