#include "klmedian/simplify.hpp"

#include <algorithm>
#include <limits>

#include "klmedian/parallel.hpp"

namespace klmedian {
namespace {

Curve pick_vertices(const Curve& tau, const std::vector<Eigen::Index>& idx) {
    VertexMatrix<double> m(tau.dim(), Eigen::Index(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) m.col(Eigen::Index(k)) = tau.vertex(idx[k]);
    return Curve(std::move(m), tau.id());
}

SimplificationResult best_single_point(const Curve& tau) {
    SimplificationResult best;
    best.error = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < tau.size(); ++i) {
        const double e = detail::point_curve_distance(tau.vertex(i), tau);
        if (e < best.error) {
            best.error = e;
            best.indices = {i};
        }
    }
    const Point<double> centre =
        0.5 * (tau.vertices().rowwise().minCoeff() + tau.vertices().rowwise().maxCoeff());
    const double e = detail::point_curve_distance(centre, tau);
    if (e < best.error) {
        best.error = e;
        best.indices.clear();
        VertexMatrix<double> m(centre);
        best.curve = Curve(std::move(m), tau.id());
    } else {
        best.curve = pick_vertices(tau, best.indices);
    }
    return best;
}

/// Fewest-edge, lexicographically smallest path 0 -> m-1 over shortcuts with error <= bound.
std::vector<Eigen::Index> canonical_path(const std::vector<std::vector<double>>& err, double bound) {
    const std::size_t m = err.size();
    constexpr std::size_t unreachable = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> hops(m, unreachable);
    hops[m - 1] = 0;
    for (std::size_t i = m - 1; i-- > 0;) {
        for (std::size_t j = i + 1; j < m; ++j) {
            if (hops[j] != unreachable && err[i][j] <= bound) hops[i] = std::min(hops[i], hops[j] + 1);
        }
    }
    std::vector<Eigen::Index> path{0};
    std::size_t cur = 0;
    while (cur != m - 1) {
        for (std::size_t j = cur + 1; j < m; ++j) {
            if (err[cur][j] <= bound && hops[j] + 1 == hops[cur]) {
                cur = j;
                break;
            }
        }
        path.push_back(Eigen::Index(cur));
    }
    return path;
}

}  // namespace

SimplificationResult simplify(const Curve& tau, std::size_t ell, const FrechetOptions& opts) {
    if (ell < 1) throw InvalidInput("simplify: ell must be at least 1");
    const std::size_t m = std::size_t(tau.size());
    if (m <= ell) {
        SimplificationResult r{tau, 0.0, {}};
        for (Eigen::Index i = 0; i < tau.size(); ++i) r.indices.push_back(i);
        return r;
    }
    if (ell == 1) return best_single_point(tau);

    std::vector<std::vector<double>> err(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 2; j < m; ++j) {
            const Curve shortcut = pick_vertices(tau, {Eigen::Index(i), Eigen::Index(j)});
            err[i][j] = frechet_distance(shortcut, tau.subcurve(Eigen::Index(i), Eigen::Index(j)), opts);
        }
    }

    // bottleneck[j]: smallest achievable max shortcut error reaching j with at most h edges.
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> bottleneck(m, inf), next(m);
    bottleneck[0] = 0.0;
    SimplificationResult best;
    best.error = inf;
    double last_bound = inf;
    for (std::size_t h = 1; h < ell; ++h) {
        next = bottleneck;
        for (std::size_t j = 1; j < m; ++j) {
            for (std::size_t i = 0; i < j; ++i) {
                if (bottleneck[i] == inf) continue;
                next[j] = std::min(next[j], std::max(bottleneck[i], err[i][j]));
            }
        }
        bottleneck.swap(next);
        const double bound = bottleneck[m - 1];
        if (bound == inf || bound == last_bound) continue;
        last_bound = bound;
        std::vector<Eigen::Index> path = canonical_path(err, bound);
        Curve candidate = pick_vertices(tau, path);
        const double e = frechet_distance(candidate, tau, opts);
        if (e < best.error) {
            best = SimplificationResult{std::move(candidate), e, std::move(path)};
        }
    }
    return best;
}

std::vector<SimplificationResult> simplify_all(const CurveDataset& T, std::size_t ell, const FrechetOptions& opts) {
    std::vector<SimplificationResult> out(T.size());
    parallel_for(T.size(), [&](std::size_t i) { out[i] = simplify(T[i], ell, opts); });
    return out;
}

}  // namespace klmedian
