#include "klmedian/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "klmedian/parallel.hpp"
#include "klmedian/random.hpp"

namespace klmedian {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Curve segment_1d(double a, double b) {
    VertexMatrix<double> v(1, a == b ? 1 : 2);
    v(0, 0) = a;
    if (a != b) v(0, 1) = b;
    return Curve(std::move(v));
}

struct Grid1d {
    double lo = 0.0;
    double step = 1.0;
    std::size_t count = 1;
    double at(std::size_t i) const { return lo + step * double(i); }
};

/// Best k segments with endpoints on the grid, via the discrete solver on a
/// |T| x |segments| table.
GridOracleResult solve_on_grid(const CurveDataset& T, std::size_t k, const Grid1d& g, double subset_cap,
                               const FrechetOptions& opts) {
    std::vector<Curve> segs;
    segs.reserve(g.count * g.count);
    for (std::size_t a = 0; a < g.count; ++a) {
        for (std::size_t b = 0; b < g.count; ++b) segs.push_back(segment_1d(g.at(a), g.at(b)));
    }
    const Eigen::MatrixXd dist = distance_matrix(T.curves, segs, opts);
    const DiscreteSolution sol = discrete_kmedian_indices(dist, k, DiscreteMode::exhaustive, subset_cap);
    GridOracleResult r;
    r.cost = sol.cost;
    r.step = g.step;
    for (std::size_t c : sol.chosen) r.centers.centers.push_back(segs[c]);
    return r;
}

}  // namespace

double exhaustive_simplification_error(const Curve& tau, std::size_t ell, const FrechetOptions& opts) {
    const auto m = std::size_t(tau.size());
    if (m > 20) throw InvalidInput("exhaustive_simplification_error: curve too long");
    double best = kInf;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        const auto bits = std::size_t(__builtin_popcount(mask));
        if (bits > ell) continue;
        VertexMatrix<double> v(tau.dim(), Eigen::Index(bits));
        Eigen::Index col = 0;
        for (std::size_t j = 0; j < m; ++j) {
            if (mask & (1u << j)) v.col(col++) = tau.vertex(Eigen::Index(j));
        }
        best = std::min(best, frechet_distance(tau, Curve(std::move(v)), opts));
    }
    return best;
}

GridOracleResult grid_median_oracle(const CurveDataset& T, std::size_t k, double rel_resolution, double subset_cap,
                                    const FrechetOptions& opts) {
    if (T.dim != 1) throw InvalidInput("grid_median_oracle: one-dimensional data only");
    if (k < 1) throw InvalidInput("grid_median_oracle: k must be at least 1");
    double lo = kInf, hi = -kInf;
    for (const auto& c : T.curves) {
        lo = std::min(lo, c.vertices().minCoeff());
        hi = std::max(hi, c.vertices().maxCoeff());
    }
    const double n = double(T.size());
    // Clamping a center into [lo, hi] never increases a distance, so OPT is
    // attained there. A grid of step h is within n h / 2 of OPT.
    std::size_t coarse = 16;
    double lower = 0.0;
    GridOracleResult best;
    while (true) {
        Grid1d g{lo, coarse > 1 ? (hi - lo) / double(coarse - 1) : 0.0, coarse};
        if (hi == lo) g = {lo, 0.0, 1};
        best = solve_on_grid(T, k, g, subset_cap, opts);
        lower = best.cost - n * g.step / 2.0;
        if (best.cost == 0.0 || lower > 0.0 || g.count == 1) break;
        coarse *= 2;
        if (coarse > 4096) throw CapacityError("grid_median_oracle: coarse grid", double(coarse), 4096.0);
    }
    if (best.cost > 0.0 && lower > 0.0) {
        const double step = rel_resolution * lower;
        const double count = std::floor((hi - lo) / step) + 2.0;
        if (std::pow(count * count, double(k)) > subset_cap * 1e3 || count > 1e5) {
            throw CapacityError("grid_median_oracle: fine grid points per axis", count, 1e5);
        }
        // Keep the coarse answer if it happens to be better; the grids differ.
        GridOracleResult fine = solve_on_grid(T, k, Grid1d{lo, step, std::size_t(count)}, subset_cap, opts);
        if (fine.cost < best.cost) best = std::move(fine);
        best.step = step;
    }

    // Pattern search on every center endpoint.
    std::vector<std::pair<double, double>> ends;
    for (const auto& c : best.centers.centers) ends.emplace_back(c.front()[0], c.back()[0]);
    auto eval = [&](const std::vector<std::pair<double, double>>& e) {
        std::vector<Curve> cs;
        for (const auto& [a, b] : e) cs.push_back(segment_1d(a, b));
        return cost(T, CenterSet(std::move(cs)), opts);
    };
    double cur = eval(ends);
    for (double h = std::max(best.step, 1e-12); h > 1e-7 * std::max(best.step, cur / n); h /= 4.0) {
        bool moved = true;
        while (moved) {
            moved = false;
            for (std::size_t c = 0; c < ends.size(); ++c) {
                for (int which = 0; which < 2; ++which) {
                    for (double dir : {-h, h}) {
                        auto trial = ends;
                        (which ? trial[c].second : trial[c].first) += dir;
                        const double v = eval(trial);
                        if (v < cur) {
                            cur = v;
                            ends = std::move(trial);
                            moved = true;
                        }
                    }
                }
            }
        }
        if (cur == 0.0) break;
    }
    if (cur < best.cost) {
        std::vector<Curve> cs;
        for (const auto& [a, b] : ends) cs.push_back(segment_1d(a, b));
        best.centers = CenterSet(std::move(cs));
        best.cost = cur;
    }
    return best;
}

std::vector<double> sensitivity_lower_bound(const CurveDataset& T, std::size_t k, std::size_t ell, std::size_t trials,
                                            std::uint64_t seed, const FrechetOptions& opts) {
    const Eigen::Index d = T.dim;
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(d, kInf), hi = Eigen::VectorXd::Constant(d, -kInf);
    for (const auto& c : T.curves) {
        lo = lo.cwiseMin(c.vertices().rowwise().minCoeff());
        hi = hi.cwiseMax(c.vertices().rowwise().maxCoeff());
    }
    const Eigen::VectorXd pad = ((hi - lo) * 0.5).cwiseMax(1e-3);
    lo -= pad;
    hi += pad;
    constexpr int kGrid = 32;

    const std::size_t n = T.size();
    // Centers are drawn from a finite alphabet. When it is small, every
    // curve-to-center distance is computed once and trials become lookups.
    std::vector<std::uint64_t> offset{0};
    double alphabet = 0.0;
    for (std::size_t m = 1; m <= ell; ++m) {
        alphabet += std::pow(double(kGrid), double(d) * double(m));
        offset.push_back(std::uint64_t(std::min(alphabet, 1e18)));
    }
    const bool tabulate = alphabet <= 1 << 20 && alphabet * double(n) <= 1e7;
    auto make_center = [&](std::size_t m, const std::vector<int>& cells) {
        VertexMatrix<double> v(d, Eigen::Index(m));
        for (std::size_t q = 0; q < cells.size(); ++q) {
            const auto i = Eigen::Index(q % std::size_t(d));
            v(i, Eigen::Index(q / std::size_t(d))) = lo[i] + (hi[i] - lo[i]) * double(cells[q]) / double(kGrid - 1);
        }
        return normalize(v);
    };
    Eigen::MatrixXd table;
    if (tabulate) {
        table.resize(Eigen::Index(n), Eigen::Index(alphabet));
        parallel_for(std::size_t(alphabet), [&](std::size_t code) {
            std::size_t m = 1;
            while (code >= offset[m]) ++m;
            std::uint64_t rest = code - offset[m - 1];
            std::vector<int> cells(m * std::size_t(d));
            for (auto& c : cells) {
                c = int(rest % kGrid);
                rest /= kGrid;
            }
            const Curve center = make_center(m, cells);
            for (std::size_t j = 0; j < n; ++j) table(Eigen::Index(j), Eigen::Index(code)) = frechet_distance(T[j], center, opts);
        });
    }

    const std::size_t workers = std::max<std::size_t>(1, std::min(thread_count(), trials));
    std::vector<std::vector<double>> partial(workers, std::vector<double>(n, 0.0));
    parallel_for(workers, [&](std::size_t w) {
        const SubstreamSampler stream(seed, 0x53454e53ULL);
        std::vector<double> dist(n);
        std::vector<int> cells;
        for (std::size_t t = w; t < trials; t += workers) {
            std::uint64_t draw = std::uint64_t(t) << 20;
            std::fill(dist.begin(), dist.end(), kInf);
            for (std::size_t c = 0; c < k; ++c) {
                const auto m = std::size_t(1 + stream.below(draw++, ell));
                cells.resize(m * std::size_t(d));
                for (auto& cell : cells) cell = int(stream.below(draw++, kGrid));
                if (tabulate) {
                    std::uint64_t code = 0;
                    for (std::size_t q = cells.size(); q-- > 0;) code = code * kGrid + std::uint64_t(cells[q]);
                    const auto col = table.col(Eigen::Index(offset[m - 1] + code));
                    for (std::size_t j = 0; j < n; ++j) dist[j] = std::min(dist[j], col[Eigen::Index(j)]);
                } else {
                    const Curve center = make_center(m, cells);
                    for (std::size_t j = 0; j < n; ++j) dist[j] = std::min(dist[j], frechet_distance(T[j], center, opts));
                }
            }
            double total = 0.0;
            for (double v : dist) total += v;
            if (!(total > 0.0)) continue;
            for (std::size_t j = 0; j < n; ++j) partial[w][j] = std::max(partial[w][j], dist[j] / total);
        }
    });
    std::vector<double> out(n, 0.0);
    for (const auto& p : partial) {
        for (std::size_t j = 0; j < n; ++j) out[j] = std::max(out[j], p[j]);
    }
    return out;
}

}  // namespace klmedian
