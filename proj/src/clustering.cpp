#include "klmedian/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "klmedian/parallel.hpp"
#include "klmedian/simplify.hpp"

namespace klmedian {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd symmetric_distance_matrix(const std::vector<Curve>& curves, const FrechetOptions& opts) {
    const std::size_t n = curves.size();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) d(Eigen::Index(i), Eigen::Index(j)) = frechet_distance(curves[i], curves[j], opts);
    });
    d.triangularView<Eigen::StrictlyLower>() = d.transpose();
    return d;
}

double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return std::round(r);
}

/// sum_i min_{c in chosen} dist(i, c), rows in ascending order.
double subset_cost(const Eigen::MatrixXd& dist, const std::vector<std::size_t>& chosen) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < dist.rows(); ++i) {
        double best = kInf;
        for (std::size_t c : chosen) best = std::min(best, dist(i, Eigen::Index(c)));
        total += best;
    }
    return total;
}

struct ExhaustiveSearch {
    const Eigen::MatrixXd& dist;
    std::size_t k;
    std::vector<std::vector<double>> partial;  // partial[depth]: row minima over the first depth+1 picks
    std::vector<std::size_t> current;
    DiscreteSolution best{{}, kInf};

    void descend(std::size_t depth, std::size_t start) {
        const std::size_t n = std::size_t(dist.cols());
        const auto& prev = partial[depth - 1];
        if (depth + 1 == k) {
            for (std::size_t c = start; c < n; ++c) {
                double total = 0.0;
                for (std::size_t i = 0; i < prev.size(); ++i) total += std::min(prev[i], dist(Eigen::Index(i), Eigen::Index(c)));
                if (total < best.cost) {
                    current[depth] = c;
                    best = {current, total};
                }
            }
            return;
        }
        auto& mine = partial[depth];
        for (std::size_t c = start; c + (k - depth) <= n; ++c) {
            for (std::size_t i = 0; i < prev.size(); ++i) mine[i] = std::min(prev[i], dist(Eigen::Index(i), Eigen::Index(c)));
            current[depth] = c;
            descend(depth + 1, c + 1);
        }
    }

    void run_from(std::size_t first) {
        const std::size_t rows = std::size_t(dist.rows());
        partial.assign(k, std::vector<double>(rows));
        current.assign(k, 0);
        current[0] = first;
        for (std::size_t i = 0; i < rows; ++i) partial[0][i] = dist(Eigen::Index(i), Eigen::Index(first));
        if (k == 1) {
            best = {current, std::accumulate(partial[0].begin(), partial[0].end(), 0.0)};
            return;
        }
        descend(1, first + 1);
    }
};

DiscreteSolution exhaustive_kmedian(const Eigen::MatrixXd& dist, std::size_t k, double cap) {
    const std::size_t n = std::size_t(dist.cols());
    const double subsets = binomial(n, k);
    if (subsets > cap) throw CapacityError("exhaustive discrete k-median: subset count", subsets, cap);
    const std::size_t firsts = n - k + 1;
    std::vector<DiscreteSolution> per_first(firsts);
    parallel_for(firsts, [&](std::size_t f) {
        ExhaustiveSearch search{dist, k, {}, {}};
        search.run_from(f);
        per_first[f] = std::move(search.best);
    });
    DiscreteSolution best{{}, kInf};
    for (auto& s : per_first) {
        if (s.cost < best.cost) best = std::move(s);
    }
    return best;
}

DiscreteSolution local_search_kmedian(const Eigen::MatrixXd& dist, std::size_t k) {
    const std::size_t n = std::size_t(dist.cols());
    std::vector<std::size_t> chosen;
    std::vector<char> in_set(n, 0);
    double current = kInf;
    // Greedy seeding: add the candidate that lowers the cost most.
    while (chosen.size() < k) {
        std::size_t pick = n;
        double pick_cost = kInf;
        for (std::size_t c = 0; c < n; ++c) {
            if (in_set[c]) continue;
            chosen.push_back(c);
            const double v = subset_cost(dist, chosen);
            chosen.pop_back();
            if (v < pick_cost) {
                pick_cost = v;
                pick = c;
            }
        }
        chosen.push_back(pick);
        in_set[pick] = 1;
        current = pick_cost;
    }
    while (true) {
        double best_cost = kInf;
        std::size_t best_slot = k, best_cand = n;
        for (std::size_t s = 0; s < k; ++s) {
            const std::size_t old = chosen[s];
            for (std::size_t c = 0; c < n; ++c) {
                if (in_set[c]) continue;
                chosen[s] = c;
                const double v = subset_cost(dist, chosen);
                if (v < best_cost) {
                    best_cost = v;
                    best_slot = s;
                    best_cand = c;
                }
            }
            chosen[s] = old;
        }
        if (best_slot == k || !(best_cost < (1.0 - 1e-4) * current)) break;
        in_set[chosen[best_slot]] = 0;
        in_set[best_cand] = 1;
        chosen[best_slot] = best_cand;
        current = best_cost;
    }
    std::sort(chosen.begin(), chosen.end());
    return {chosen, subset_cost(dist, chosen)};
}

}  // namespace

Eigen::Index CenterSet::max_complexity() const {
    Eigen::Index m = 0;
    for (const auto& c : centers) m = std::max(m, c.size());
    return m;
}

std::vector<std::size_t> ClusteringResult::cell_sizes() const {
    std::vector<std::size_t> sizes(centers.size(), 0);
    for (std::size_t a : assignment) ++sizes[a];
    return sizes;
}

DiscreteMode parse_discrete_mode(const std::string& name) {
    if (name == "exhaustive") return DiscreteMode::exhaustive;
    if (name == "local_search") return DiscreteMode::local_search;
    throw InvalidInput("unknown mode '" + name + "' (expected exhaustive or local_search)");
}

std::string to_string(DiscreteMode mode) {
    return mode == DiscreteMode::exhaustive ? "exhaustive" : "local_search";
}

Eigen::MatrixXd distance_matrix(const std::vector<Curve>& rows, const std::vector<Curve>& cols,
                                const FrechetOptions& opts) {
    Eigen::MatrixXd d(Eigen::Index(rows.size()), Eigen::Index(cols.size()));
    parallel_for(rows.size(), [&](std::size_t i) {
        for (std::size_t j = 0; j < cols.size(); ++j) d(Eigen::Index(i), Eigen::Index(j)) = frechet_distance(rows[i], cols[j], opts);
    });
    return d;
}

double cost(const CurveDataset& T, const CenterSet& C, const FrechetOptions& opts) {
    if (C.size() == 0) throw InvalidInput("cost: empty center set");
    const Eigen::MatrixXd d = distance_matrix(T.curves, C.centers, opts);
    double total = 0.0;
    for (Eigen::Index i = 0; i < d.rows(); ++i) total += d.row(i).minCoeff();
    return total;
}

double weighted_cost(const WeightedCurveSet& S, const CenterSet& C, const FrechetOptions& opts) {
    if (C.size() == 0) throw InvalidInput("weighted_cost: empty center set");
    const std::vector<double> w = S.pooled_weights();
    const Eigen::MatrixXd d = distance_matrix(S.curves, C.centers, opts);
    double total = 0.0;
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        if (w[std::size_t(i)] != 0.0) total += w[std::size_t(i)] * d.row(i).minCoeff();
    }
    return total;
}

ClusteringResult voronoi_from_distances(const Eigen::MatrixXd& dist, CenterSet C) {
    ClusteringResult r;
    const std::size_t n = std::size_t(dist.rows());
    r.assignment.resize(n);
    r.distances.resize(n);
    r.cluster_costs.assign(C.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::Index j = 0;
        // minCoeff returns the first minimum, i.e. the lowest center index on ties.
        const double d = dist.row(Eigen::Index(i)).minCoeff(&j);
        r.assignment[i] = std::size_t(j);
        r.distances[i] = d;
    }
    for (std::size_t i = 0; i < n; ++i) r.cluster_costs[r.assignment[i]] += r.distances[i];
    for (std::size_t i = 0; i < n; ++i) r.total_cost += r.distances[i];
    r.centers = std::move(C);
    return r;
}

ClusteringResult voronoi_partition(const CurveDataset& T, const CenterSet& C, const FrechetOptions& opts) {
    if (C.size() == 0) throw InvalidInput("voronoi_partition: empty center set");
    return voronoi_from_distances(distance_matrix(T.curves, C.centers, opts), C);
}

DiscreteSolution discrete_kmedian_indices(const Eigen::MatrixXd& dist, std::size_t k, DiscreteMode mode,
                                          double subset_cap) {
    const std::size_t n = std::size_t(dist.cols());
    if (k < 1) throw InvalidInput("discrete_kmedian: k must be at least 1");
    if (k > n) throw InvalidInput("discrete_kmedian: k exceeds the number of candidates");
    return mode == DiscreteMode::exhaustive ? exhaustive_kmedian(dist, k, subset_cap) : local_search_kmedian(dist, k);
}

ClusteringResult discrete_kmedian(const CurveDataset& candidates, std::size_t k, DiscreteMode mode, double subset_cap,
                                  const FrechetOptions& opts) {
    if (k > candidates.size()) throw InvalidInput("discrete_kmedian: k exceeds the number of candidates");
    const Eigen::MatrixXd dist = symmetric_distance_matrix(candidates.curves, opts);
    const DiscreteSolution sol = discrete_kmedian_indices(dist, k, mode, subset_cap);
    std::vector<Curve> centers;
    Eigen::MatrixXd cols(dist.rows(), Eigen::Index(sol.chosen.size()));
    for (std::size_t j = 0; j < sol.chosen.size(); ++j) {
        centers.push_back(candidates[sol.chosen[j]]);
        cols.col(Eigen::Index(j)) = dist.col(Eigen::Index(sol.chosen[j]));
    }
    ClusteringResult r = voronoi_from_distances(cols, CenterSet(std::move(centers)));
    r.center_indices = sol.chosen;
    r.approx_factor = discrete_factor(mode);
    return r;
}

ClusteringResult kl_median_constant_factor(const CurveDataset& T, const ConstantFactorConfig& cfg,
                                           const FrechetOptions& opts) {
    if (cfg.ell < 1) throw InvalidInput("kl_median_constant_factor: ell must be at least 1");
    if (cfg.k < 1 || cfg.k > T.size()) throw InvalidInput("kl_median_constant_factor: need 1 <= k <= n");
    const auto simplified = simplify_all(T, cfg.ell, opts);
    std::vector<Curve> hat;
    hat.reserve(simplified.size());
    for (const auto& s : simplified) hat.push_back(s.curve);
    const ClusteringResult inner = discrete_kmedian(CurveDataset(hat), cfg.k, cfg.mode, cfg.subset_cap, opts);
    ClusteringResult r = voronoi_partition(T, inner.centers, opts);
    r.center_indices = inner.center_indices;
    r.approx_factor = pipeline_factor(discrete_factor(cfg.mode));
    return r;
}

ClusteringResult one_median_bootstrap(const CurveDataset& T, std::size_t ell, const FrechetOptions& opts) {
    const auto simplified = simplify_all(T, ell, opts);
    std::vector<Curve> hat;
    hat.reserve(simplified.size());
    for (const auto& s : simplified) hat.push_back(s.curve);
    const Eigen::MatrixXd d = distance_matrix(T.curves, hat, opts);
    std::size_t best = 0;
    double best_cost = kInf;
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < d.rows(); ++i) total += d(i, j);
        if (total < best_cost) {
            best_cost = total;
            best = std::size_t(j);
        }
    }
    ClusteringResult r = voronoi_from_distances(d.col(Eigen::Index(best)), CenterSet({hat[best]}));
    r.center_indices = {best};
    r.approx_factor = kBootstrapFactor;
    return r;
}

}  // namespace klmedian
