#include "klmedian/median1.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include <json.hpp>


#include "klmedian/parallel.hpp"
#include "klmedian/random.hpp"
#include "klmedian/simplify.hpp"

namespace klmedian {
namespace {

using json = nlohmann::json;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kTagS = 0x53ULL;
constexpr std::uint64_t kTagW = 0x57ULL;

// Lower bounds are shaved by this much to absorb their own rounding.
constexpr double kBoundRelSlack = 1e-12;
constexpr double kBoundAbsSlack = 1e-14;
// A candidate must beat the incumbent by this relative margin, the order of the
// distance tolerance; near-ties inside it are not separated by the search.
constexpr double kImproveRel = 1e-8;
// Tasks per synchronisation round. Fixed, so the result does not depend on threads.
constexpr std::size_t kBatch = 8;

json point_json(const Point<double>& p) {
    json a = json::array();
    for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(p[i]);
    return a;
}

json curve_json(const Curve& c) {
    json a = json::array();
    for (Eigen::Index j = 0; j < c.size(); ++j) a.push_back(point_json(c.vertex(j)));
    return a;
}

Curve curve_from_indices(const std::vector<Point<double>>& P, const std::vector<std::size_t>& idx) {
    VertexMatrix<double> m(P.front().size(), Eigen::Index(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) m.col(Eigen::Index(j)) = P[idx[j]];
    return Curve(std::move(m));
}

/// Squared distance from p to segment [a, b] in dimension d.
double segment_dist2(const double* p, const double* a, const double* b, Eigen::Index d) {
    double ab2 = 0.0, t = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        ab2 += (b[i] - a[i]) * (b[i] - a[i]);
        t += (p[i] - a[i]) * (b[i] - a[i]);
    }
    t = ab2 > 0.0 ? std::clamp(t / ab2, 0.0, 1.0) : 0.0;
    double out = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        const double e = p[i] - (a[i] + t * (b[i] - a[i]));
        out += e * e;
    }
    return out;
}

/// Distance from p to the nearest point of the polyline through pts.
double polyline_distance(const double* p, const std::vector<const double*>& pts, Eigen::Index d) {
    if (pts.size() == 1) return std::sqrt(segment_dist2(p, pts[0], pts[0], d));
    double best = kInf;
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) best = std::min(best, segment_dist2(p, pts[j], pts[j + 1], d));
    return std::sqrt(best);
}

double slacked(double lb) { return std::max(0.0, lb * (1.0 - kBoundRelSlack) - kBoundAbsSlack); }

/// Exhaustive search for the candidate of least coreset cost, with
/// branch-and-bound. Under any matching of a candidate c with a pool curve s,
/// c's first vertex meets s's start, its last vertex meets s's end, and every
/// vertex of either curve meets some point of the other, so d_F(c, s) is at least
/// the largest of those distances. In one dimension a segment is monotone, so
/// d_F is also at least half of s's largest backtrack against its direction.
///
/// Candidates with K distinct consecutive vertices, K = 1..L, are searched over
/// K-tuples of nodes of a balanced tree on the sorted P. A node tuple is bounded
/// by the per-node minima of the point terms and by the distance from s's
/// vertices to the bounding box of the union of the nodes, which contains the
/// candidate. Tuples of leaves are expanded point by point.
///
/// A candidate replaces the incumbent only if it is cheaper by a factor
/// (1 - kImproveRel), so the result is optimal up to that factor.
struct CandidateSearch {
    static constexpr std::size_t kLeafSize = 8;

    struct Node {
        std::size_t lo = 0, hi = 0;  // range in P
        std::size_t left = 0, right = 0;
        bool leaf = true;
        Eigen::VectorXd box_lo, box_hi;
    };

    struct Best {
        double cost = kInf;
        Curve curve;
    };

    const std::vector<Point<double>>& P;
    const std::vector<Curve>& pool;
    const std::vector<double>& weight;
    std::size_t L;
    const FrechetOptions& opts;
    Eigen::Index dim;
    Eigen::MatrixXd front_d, back_d, near_d;  // pool x |P|
    std::vector<Node> nodes;
    Eigen::MatrixXd front_n, back_n, near_n;  // pool x nodes, minima over the node
    // One dimension only: half the largest drop (up) and rise (down) of each pool curve.
    std::vector<double> half_up, half_down;
    mutable std::atomic<std::uint64_t> states{0}, leaves{0}, decided{0}, evaluated{0};

    CandidateSearch(const std::vector<Point<double>>& P_, const std::vector<Curve>& pool_, const std::vector<double>& w,
                    std::size_t L_, const FrechetOptions& o)
        : P(P_), pool(pool_), weight(w), L(L_), opts(o), dim(P_.front().size()) {
        const Eigen::Index np = Eigen::Index(P.size()), nc = Eigen::Index(pool.size());
        front_d.resize(nc, np);
        back_d.resize(nc, np);
        near_d.resize(nc, np);
        parallel_for(P.size(), [&](std::size_t p) {
            for (Eigen::Index i = 0; i < nc; ++i) {
                const Curve& s = pool[std::size_t(i)];
                front_d(i, Eigen::Index(p)) = (P[p] - s.front()).norm();
                back_d(i, Eigen::Index(p)) = (P[p] - s.back()).norm();
                std::vector<const double*> pts;
                for (Eigen::Index j = 0; j < s.size(); ++j) pts.push_back(s.vertices().data() + j * s.dim());
                near_d(i, Eigen::Index(p)) = polyline_distance(P[p].data(), pts, s.dim());
            }
        });
        build(0, P.size());
        front_n.resize(nc, Eigen::Index(nodes.size()));
        back_n.resize(nc, Eigen::Index(nodes.size()));
        near_n.resize(nc, Eigen::Index(nodes.size()));
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const Node& n = nodes[k];
            const auto cols = Eigen::Index(n.hi - n.lo), first = Eigen::Index(n.lo), kk = Eigen::Index(k);
            front_n.col(kk) = front_d.middleCols(first, cols).rowwise().minCoeff();
            back_n.col(kk) = back_d.middleCols(first, cols).rowwise().minCoeff();
            near_n.col(kk) = near_d.middleCols(first, cols).rowwise().minCoeff();
        }
        half_up.assign(pool.size(), 0.0);
        half_down.assign(pool.size(), 0.0);
        if (dim == 1) {
            for (std::size_t i = 0; i < pool.size(); ++i) {
                const auto v = pool[i].vertices().row(0);
                double hi = v[0], lo = v[0];
                for (Eigen::Index j = 1; j < v.size(); ++j) {
                    half_up[i] = std::max(half_up[i], 0.5 * (hi - v[j]));
                    half_down[i] = std::max(half_down[i], 0.5 * (v[j] - lo));
                    hi = std::max(hi, v[j]);
                    lo = std::min(lo, v[j]);
                }
            }
        }
    }

    std::size_t build(std::size_t lo, std::size_t hi) {
        const std::size_t id = nodes.size();
        nodes.emplace_back();
        Node n;
        n.lo = lo;
        n.hi = hi;
        n.box_lo = P[lo];
        n.box_hi = P[lo];
        for (std::size_t p = lo + 1; p < hi; ++p) {
            n.box_lo = n.box_lo.cwiseMin(P[p]);
            n.box_hi = n.box_hi.cwiseMax(P[p]);
        }
        if (hi - lo > kLeafSize) {
            n.leaf = false;
            const std::size_t mid = lo + (hi - lo) / 2;
            n.left = build(lo, mid);
            n.right = build(mid, hi);
        }
        nodes[id] = std::move(n);
        return id;
    }

    static bool prunes(double lower, double bound) { return lower >= bound * (1.0 - kImproveRel); }

    double bound_of(const Eigen::VectorXd& partial) const {
        double total = 0.0;
        for (Eigen::Index i = 0; i < partial.size(); ++i) total += weight[std::size_t(i)] * slacked(partial[i]);
        return total;
    }

    /// Backtrack term for a one-dimensional segment from a to b.
    double backtrack(std::size_t i, double a, double b) const {
        if (a < b) return half_up[i];
        if (a > b) return half_down[i];
        return std::max(half_up[i], half_down[i]);
    }

    /// Lower bound on the coreset cost of every candidate drawn from the node tuple.
    double tuple_bound(const std::vector<std::size_t>& t) const {
        Eigen::VectorXd lo = nodes[t[0]].box_lo, hi = nodes[t[0]].box_hi;
        for (std::size_t j = 1; j < t.size(); ++j) {
            lo = lo.cwiseMin(nodes[t[j]].box_lo);
            hi = hi.cwiseMax(nodes[t[j]].box_hi);
        }
        // Direction of a one-dimensional segment, when the two boxes fix it.
        int direction = 0;
        if (dim == 1 && t.size() == 2) {
            if (nodes[t[0]].box_hi[0] < nodes[t[1]].box_lo[0]) direction = 1;
            else if (nodes[t[0]].box_lo[0] > nodes[t[1]].box_hi[0]) direction = -1;
        }
        double total = 0.0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const auto ii = Eigen::Index(i);
            double h = std::max(front_n(ii, Eigen::Index(t.front())), back_n(ii, Eigen::Index(t.back())));
            for (std::size_t k : t) h = std::max(h, near_n(ii, Eigen::Index(k)));
            if (dim == 1 && t.size() <= 2) {
                h = std::max(h, direction > 0   ? half_up[i]
                                : direction < 0 ? half_down[i]
                                : t.size() == 1 ? std::max(half_up[i], half_down[i])
                                                : std::min(half_up[i], half_down[i]));
            }
            const Curve& s = pool[i];
            for (Eigen::Index j = 0; j < s.size(); ++j) {
                double g2 = 0.0;
                for (Eigen::Index a = 0; a < dim; ++a) {
                    const double x = s.vertices()(a, j);
                    const double gap = x < lo[a] ? lo[a] - x : (x > hi[a] ? x - hi[a] : 0.0);
                    g2 += gap * gap;
                }
                h = std::max(h, std::sqrt(g2));
            }
            total += weight[i] * slacked(h);
        }
        return total;
    }

    /// Exact coreset cost summed in pool order, or infinity once the candidate
    /// provably fails to beat `bound`. lb holds per-curve lower bounds.
    double evaluate(const Curve& c, Eigen::VectorXd& lb, double bound) const {
        double rem = bound * (1.0 - kImproveRel);
        for (Eigen::Index i = 0; i < lb.size(); ++i) {
            lb[i] = slacked(lb[i]);
            rem -= weight[std::size_t(i)] * lb[i];
        }
        if (rem <= 0.0) return kInf;
        decided.fetch_add(1, std::memory_order_relaxed);
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (weight[i] == 0.0) continue;
            if (!frechet_decide(pool[i], c, lb[Eigen::Index(i)] + rem / weight[i])) return kInf;
        }
        evaluated.fetch_add(1, std::memory_order_relaxed);
        double total = 0.0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (weight[i] == 0.0) continue;
            const double d = frechet_distance(pool[i], c, opts);
            total += weight[i] * d;
            rem -= weight[i] * (d - lb[Eigen::Index(i)]);
            if (rem < 0.0) return kInf;
        }
        return total;
    }

    /// Depth-first over node tuples, splitting the widest non-leaf node and
    /// visiting the child with the smaller bound first. `best` starts at the
    /// incumbent of the round, so the outcome depends only on it.
    void search(std::vector<std::size_t>& t, Best& best) const {
        states.fetch_add(1, std::memory_order_relaxed);
        if (prunes(tuple_bound(t), best.cost)) return;
        std::size_t split = t.size();
        std::size_t widest = 0;
        for (std::size_t j = 0; j < t.size(); ++j) {
            const Node& n = nodes[t[j]];
            if (!n.leaf && n.hi - n.lo > widest) {
                widest = n.hi - n.lo;
                split = j;
            }
        }
        if (split == t.size()) {
            std::vector<std::size_t> tuple(t.size());
            std::vector<Eigen::VectorXd> partial(t.size());
            Eigen::VectorXd leaf(Eigen::Index(pool.size()));
            expand(t, 0, tuple, partial, leaf, best);
            return;
        }
        const std::size_t node = t[split];
        std::size_t first = nodes[node].left, second = nodes[node].right;
        t[split] = first;
        const double b1 = tuple_bound(t);
        t[split] = second;
        const double b2 = tuple_bound(t);
        if (b2 < b1) std::swap(first, second);
        for (std::size_t child : {first, second}) {
            t[split] = child;
            search(t, best);
        }
        t[split] = node;
    }

    /// Point-by-point enumeration inside a tuple of leaves.
    void expand(const std::vector<std::size_t>& t, std::size_t depth, std::vector<std::size_t>& tuple,
                std::vector<Eigen::VectorXd>& partial, Eigen::VectorXd& leaf, Best& best) const {
        const std::size_t K = t.size();
        const Node& n = nodes[t[depth]];
        for (std::size_t p = n.lo; p < n.hi; ++p) {
            if (depth > 0 && p == tuple[depth - 1]) continue;
            tuple[depth] = p;
            const auto pp = Eigen::Index(p);
            Eigen::VectorXd cur = near_d.col(pp);
            if (depth == 0) cur = cur.cwiseMax(front_d.col(pp));
            if (depth + 1 == K) cur = cur.cwiseMax(back_d.col(pp));
            partial[depth] = depth == 0 ? cur : partial[depth - 1].cwiseMax(cur);
            if (dim == 1 && K <= 2 && depth + 1 == K) {
                const double a = P[tuple[0]][0], b = P[p][0];
                for (std::size_t i = 0; i < pool.size(); ++i) {
                    auto& v = partial[depth][Eigen::Index(i)];
                    v = std::max(v, backtrack(i, a, b));
                }
            }
            if (prunes(bound_of(partial[depth]), best.cost)) continue;
            if (depth + 1 < K) {
                expand(t, depth + 1, tuple, partial, leaf, best);
                continue;
            }
            leaves.fetch_add(1, std::memory_order_relaxed);
            std::vector<const double*> kept;
            for (std::size_t q : tuple) kept.push_back(P[q].data());
            for (std::size_t i = 0; i < pool.size(); ++i) {
                double h = partial[depth][Eigen::Index(i)];
                const Curve& s = pool[i];
                for (Eigen::Index j = 0; j < s.size(); ++j) {
                    h = std::max(h, polyline_distance(s.vertices().data() + j * dim, kept, dim));
                }
                leaf[Eigen::Index(i)] = h;
            }
            if (prunes(bound_of(leaf), best.cost)) continue;
            // Pad with the last vertex to the enumeration tuple of length L.
            std::vector<std::size_t> full(tuple);
            full.resize(L, tuple.back());
            Curve c;
            if (!canonical_candidate(P, full, &c)) continue;
            const double v = evaluate(c, leaf, best.cost);
            if (v < best.cost) best = {v, std::move(c)};
        }
    }
};

}  // namespace

json Median1Trace::to_json() const {
    json j;
    j["epsilon_prime"] = epsilon_prime;
    j["alpha_hat"] = alpha_hat;
    j["Delta"] = delta_cost;
    j["Delta_u"] = delta_upper;
    j["Delta_l"] = delta_lower;
    j["short_circuit"] = short_circuit;
    j["coreset_entries"] = coreset_entries;
    j["coreset_distinct"] = coreset_distinct;
    j["sample_S"] = sample_s;
    j["sample_W"] = sample_w;
    j["bootstrap"] = bootstrap.size() ? curve_json(bootstrap) : json::array();
    j["pivot"] = pivot.size() ? curve_json(pivot) : json::array();
    j["pivot_index"] = pivot_index;
    j["radius"] = radius;
    j["cell_width"] = cell_width;
    json pts = json::array();
    for (const auto& p : candidate_points) pts.push_back(point_json(p));
    j["P"] = std::move(pts);
    j["candidate_count"] = candidate_count;
    j["winner"] = winner.size() ? curve_json(winner) : json::array();
    j["winner_coreset_cost"] = winner_coreset_cost;
    return j;
}

std::size_t rank_by_sample(const std::vector<Curve>& S, const std::vector<Curve>& W, const FrechetOptions& opts) {
    if (S.empty() || W.empty()) throw InvalidInput("rank_by_sample: S and W must be non-empty");
    const Eigen::MatrixXd d = distance_matrix(W, S, opts);
    std::size_t best = 0;
    double best_cost = kInf;
    for (Eigen::Index s = 0; s < d.cols(); ++s) {
        double total = 0.0;
        for (Eigen::Index w = 0; w < d.rows(); ++w) total += d(w, s);
        if (total < best_cost) {
            best_cost = total;
            best = std::size_t(s);
        }
    }
    return best;
}

std::size_t rank_by_sample(const std::vector<std::size_t>& S, const std::vector<std::size_t>& w_counts,
                           const Eigen::MatrixXd& dist) {
    if (S.empty()) throw InvalidInput("rank_by_sample: S must be non-empty");
    std::size_t best = 0;
    double best_cost = kInf;
    for (std::size_t pos = 0; pos < S.size(); ++pos) {
        double total = 0.0;
        for (std::size_t w = 0; w < w_counts.size(); ++w) {
            if (w_counts[w]) total += double(w_counts[w]) * dist(Eigen::Index(w), Eigen::Index(S[pos]));
        }
        if (total < best_cost) {
            best_cost = total;
            best = pos;
        }
    }
    return best;
}

std::vector<Point<double>> shortcut_candidates(const Curve& pivot, double radius, double cell_width, double grid_cap) {
    std::vector<Point<double>> P;
    double used = 0.0;
    for (Eigen::Index j = 0; j < pivot.size(); ++j) {
        const double cells = grid_cover_bound(radius, cell_width, pivot.dim());
        if (used + cells > grid_cap) throw CapacityError("shortcut_candidates: total grid cells", used + cells, grid_cap);
        used += cells;
        auto cover = grid_cover_ball(Ball<double>{pivot.vertex(j), radius}, cell_width, grid_cap);
        P.insert(P.end(), std::make_move_iterator(cover.begin()), std::make_move_iterator(cover.end()));
    }
    std::sort(P.begin(), P.end(), LexicographicLess{});
    P.erase(std::unique(P.begin(), P.end(), [](const Point<double>& a, const Point<double>& b) { return a == b; }),
            P.end());
    return P;
}

bool canonical_candidate(const std::vector<Point<double>>& P, const std::vector<std::size_t>& tuple, Curve* out) {
    std::vector<std::size_t> kept{tuple.front()};
    bool padding = false;
    for (std::size_t j = 1; j < tuple.size(); ++j) {
        if (tuple[j] == tuple[j - 1]) {
            padding = true;
        } else if (padding) {
            return false;
        } else {
            kept.push_back(tuple[j]);
        }
    }
    Curve c = curve_from_indices(P, kept);
    if (kept.size() >= 3 && normalize(c).size() != c.size()) return false;
    if (out) *out = std::move(c);
    return true;
}

void enumerate_candidate_curves(const std::vector<Point<double>>& P, std::size_t ell, double cap,
                                const std::function<void(const Curve&, std::uint64_t)>& visit) {
    if (ell < 2) throw InvalidInput("enumerate_candidate_curves: ell must be at least 2");
    if (P.empty()) return;
    const std::size_t L = 2 * ell - 2;
    const double raw = std::pow(double(P.size()), double(L));
    if (raw > cap) throw CapacityError("candidate tuples (use a larger epsilon or a smaller instance)", raw, cap);
    std::vector<std::size_t> tuple(L, 0);
    const auto total = std::uint64_t(raw);
    for (std::uint64_t index = 0; index < total; ++index) {
        Curve c;
        if (canonical_candidate(P, tuple, &c)) visit(c, index);
        for (std::size_t axis = L; axis-- > 0;) {
            if (++tuple[axis] < P.size()) break;
            tuple[axis] = 0;
        }
    }
}

Curve one_median_5eps(const CurveDataset& T, const Median1Config& cfg, Median1Trace* trace_out,
                      const FrechetOptions& opts) {
    if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 0.5)) throw InvalidInput("epsilon must lie in (0, 1/2]");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
    if (cfg.ell < 2) throw InvalidInput("ell must be at least 2");
    if (!(cfg.candidate_cap < 0x1.0p63)) throw InvalidInput("candidate cap must be below 2^63");

    Median1Trace tr;
    const double n = double(T.size());
    const double eps = cfg.epsilon / 67.0;
    tr.epsilon_prime = eps;

    const ClusteringResult boot = one_median_bootstrap(T, cfg.ell, opts);
    tr.bootstrap = boot.centers[0];
    tr.alpha_hat = boot.approx_factor;
    auto finish_short = [&](const Curve& c) {
        tr.short_circuit = true;
        tr.winner = c;
        if (trace_out) *trace_out = std::move(tr);
        return c;
    };
    if (boot.total_cost == 0.0) return finish_short(boot.centers[0]);

    CoresetConfig cc;
    cc.k = 1;
    cc.ell = 2 * cfg.ell - 2;
    cc.epsilon = eps;
    cc.delta = cfg.delta / 4.0;
    cc.sample_size = cfg.coreset_size;
    cc.c_sample = cfg.c_sample;
    cc.seed = cfg.seed;
    const CoresetBuild cs = build_coreset(T, cc, opts);
    tr.coreset_entries = cs.coreset.size();
    tr.coreset_distinct = cs.coreset.curves.size();

    tr.delta_cost = weighted_cost(cs.coreset, CenterSet({boot.centers[0]}), opts);
    tr.winner_coreset_cost = tr.delta_cost;
    if (tr.delta_cost == 0.0) return finish_short(boot.centers[0]);
    tr.delta_upper = tr.delta_cost / (1.0 - eps);
    tr.delta_lower = tr.delta_cost / ((1.0 + eps) * tr.alpha_hat);

    const double log_term = std::log(cfg.delta) - std::log(4.0);
    tr.sample_s = std::size_t(std::ceil(-2.0 / eps * log_term));
    const double inner = std::ceil(-8.0 / eps * log_term);
    tr.sample_w = std::size_t(std::ceil(-64.0 / (eps * eps) * (std::log(cfg.delta) - std::log(inner))));

    const SubstreamSampler s_stream(cfg.seed, kTagS), w_stream(cfg.seed, kTagW);
    std::vector<std::size_t> S(tr.sample_s);
    for (std::size_t t = 0; t < S.size(); ++t) S[t] = std::size_t(s_stream.below(t, T.size()));
    std::vector<std::size_t> w_counts(T.size(), 0);
    for (std::size_t t = 0; t < tr.sample_w; ++t) ++w_counts[std::size_t(w_stream.below(t, T.size()))];

    std::vector<std::size_t> distinct_s(S);
    std::sort(distinct_s.begin(), distinct_s.end());
    distinct_s.erase(std::unique(distinct_s.begin(), distinct_s.end()), distinct_s.end());
    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(Eigen::Index(T.size()), Eigen::Index(T.size()));
    parallel_for(distinct_s.size(), [&](std::size_t k) {
        const std::size_t s = distinct_s[k];
        for (std::size_t w = 0; w < T.size(); ++w) {
            if (w_counts[w]) dist(Eigen::Index(w), Eigen::Index(s)) = frechet_distance(T[w], T[s], opts);
        }
    });
    tr.pivot_index = S[rank_by_sample(S, w_counts, dist)];
    tr.pivot = T[tr.pivot_index];

    tr.radius = (3.0 + 4.0 * eps) * tr.delta_upper / n;
    tr.cell_width = eps * tr.delta_lower / (n * std::sqrt(double(T.dim)));
    tr.candidate_points = shortcut_candidates(tr.pivot, tr.radius, tr.cell_width, cfg.grid_cap);
    const auto& P = tr.candidate_points;
    const std::size_t L = 2 * cfg.ell - 2;
    tr.candidate_count = std::pow(double(P.size()), double(L));
    spdlog::info("median1: |P|={} tuples={:.6g} coreset distinct={}", P.size(), tr.candidate_count,
                 tr.coreset_distinct);
    if (tr.candidate_count > cfg.candidate_cap) {
        throw CapacityError("candidate tuples (use a larger epsilon or a smaller instance)", tr.candidate_count,
                            cfg.candidate_cap);
    }

    // Start from the pivot's simplification snapped to the grid; its vertices lie in P.
    std::vector<std::size_t> tuple;
    {
        const Curve simple = simplify(tr.pivot, L, opts).curve;
        for (Eigen::Index j = 0; j < simple.size(); ++j) {
            const Point<double> g = grid_point(simple.vertex(j), tr.cell_width);
            const auto it = std::lower_bound(P.begin(), P.end(), g, LexicographicLess{});
            if (it == P.end() || *it != g) throw std::logic_error("one_median_5eps: snapped pivot vertex missing from P");
            const auto idx = std::size_t(it - P.begin());
            if (tuple.empty() || tuple.back() != idx) tuple.push_back(idx);
        }
    }
    double cost = kInf;
    Curve winner = best_candidate(P, cs.coreset.curves, cs.coreset.pooled_weights(), cfg.ell,
                                  curve_from_indices(P, tuple), &cost, opts);
    tr.winner = winner;
    tr.winner_coreset_cost = cost;
    if (trace_out) *trace_out = std::move(tr);
    return winner;
}

Curve best_candidate(const std::vector<Point<double>>& P, const std::vector<Curve>& pool,
                     const std::vector<double>& weight, std::size_t ell, const Curve& start, double* cost,
                     const FrechetOptions& opts) {
    if (P.empty() || ell < 2) throw InvalidInput("best_candidate: empty point set or ell < 2");
    if (pool.size() != weight.size()) throw InvalidInput("best_candidate: pool and weights differ in size");
    const std::size_t L = 2 * ell - 2;
    CandidateSearch search(P, pool, weight, L, opts);
    CandidateSearch::Best incumbent;

    // Any candidate's cost bounds the optimum from above. Improve the starting
    // curve by a pattern search over tuple indices. It wins unless the search beats it.
    {
        const Curve seed_curve = normalize(start, kDefaultCollinearityTol);
        std::vector<std::size_t> tuple;
        for (Eigen::Index j = 0; j < seed_curve.size(); ++j) {
            const Point<double> v = seed_curve.vertex(j);
            const auto it = std::lower_bound(P.begin(), P.end(), v, LexicographicLess{});
            if (it == P.end() || *it != v) throw InvalidInput("best_candidate: start vertex not in P");
            tuple.push_back(std::size_t(it - P.begin()));
        }
        tuple.resize(L, tuple.back());
        auto tuple_cost = [&](const std::vector<std::size_t>& t) {
            Curve c;
            if (!canonical_candidate(P, t, &c)) return kInf;
            double total = 0.0;
            for (std::size_t i = 0; i < weight.size(); ++i) {
                if (weight[i] != 0.0) total += weight[i] * frechet_distance(pool[i], c, opts);
            }
            return total;
        };
        double current = tuple_cost(tuple);
        for (std::size_t step = std::max<std::size_t>(1, P.size() / 4);; step /= 2) {
            for (bool moved = true; moved;) {
                moved = false;
                for (std::size_t j = 0; j < L; ++j) {
                    for (int dir : {-1, 1}) {
                        if (dir < 0 ? tuple[j] < step : tuple[j] + step >= P.size()) continue;
                        auto trial = tuple;
                        trial[j] = dir < 0 ? tuple[j] - step : tuple[j] + step;
                        const double v = tuple_cost(trial);
                        if (v < current) {
                            current = v;
                            tuple = std::move(trial);
                            moved = true;
                        }
                    }
                }
            }
            if (step == 1) break;
        }
        Curve c;
        canonical_candidate(P, tuple, &c);
        incumbent = {current, std::move(c)};
        spdlog::debug("median1: initial bound {}", current);
    }

    // Tasks are (K, first-position subtree) pairs at a depth giving enough of them
    // to balance threads; they run in order of their bound so strong candidates come early.
    std::vector<std::vector<std::size_t>> tasks;
    {
        std::vector<std::size_t> level{0};
        while (level.size() < 64) {
            std::vector<std::size_t> next;
            for (std::size_t k : level) {
                if (search.nodes[k].leaf) {
                    next.push_back(k);
                } else {
                    next.push_back(search.nodes[k].left);
                    next.push_back(search.nodes[k].right);
                }
            }
            if (next.size() == level.size()) break;
            level = std::move(next);
        }
        for (std::size_t K = 1; K <= L; ++K) {
            for (std::size_t k : level) {
                std::vector<std::size_t> t(K, 0);
                t[0] = k;
                tasks.push_back(std::move(t));
            }
        }
    }
    std::vector<double> task_bound(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) task_bound[i] = search.tuple_bound(tasks[i]);
    std::vector<std::size_t> order(tasks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return task_bound[x] < task_bound[y]; });
    // Rounds of kBatch tasks all start from the incumbent of the round, and
    // results merge in task order, so threads cannot change the outcome.
    CandidateSearch::Best best = std::move(incumbent);
    for (std::size_t start = 0; start < order.size(); start += kBatch) {
        const std::size_t count = std::min(kBatch, order.size() - start);
        std::vector<CandidateSearch::Best> round(count);
        parallel_for(count, [&](std::size_t r) {
            round[r].cost = best.cost;
            std::vector<std::size_t> t = tasks[order[start + r]];
            search.search(t, round[r]);
        });
        for (auto& b : round) {
            if (b.curve.size() > 0 && b.cost < best.cost) best = std::move(b);
        }
    }
    spdlog::debug("median1: states={} leaves={} decided={} evaluated={}", search.states.load(), search.leaves.load(),
                  search.decided.load(), search.evaluated.load());
    if (best.cost == kInf) throw std::logic_error("best_candidate: search found no candidate");
    if (cost) *cost = best.cost;
    return best.curve;
}

}  // namespace klmedian
