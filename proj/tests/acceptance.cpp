// Acceptance suite: one line per criterion, exit status 1 if any fails.
// Usage: acceptance [criterion numbers...]

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "helpers.hpp"
#include "klmedian/coreset.hpp"
#include "klmedian/median1.hpp"
#include "klmedian/oracles.hpp"
#include "klmedian/simplify.hpp"
#include "klmedian/synthetic.hpp"
#include "process.hpp"

using namespace klmedian;
using nlohmann::json;

namespace {

const std::string kCli = KLMEDIAN_CLI;
const std::string kFixtures = KLMEDIAN_FIXTURE_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Violations of the lambda scheme, accumulated by every criterion that builds a profile.
struct SchemeTally {
    std::size_t profiles = 0;
    std::size_t violations = 0;

    void add(const SensitivityProfile& p) {
        ++profiles;
        const double n = double(p.size());
        double psi = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            const double scaled = p.lambda[j] * n;
            const bool ok = scaled == std::floor(scaled) && scaled == double(p.lambda_scaled[j]) &&
                            p.gamma[j] <= p.lambda[j] && p.lambda[j] <= 2.0 * p.gamma[j] + 1.0 / n;
            if (!ok) ++violations;
            psi += p.psi[j];
        }
        if (std::abs(psi - 1.0) > 1e-12) ++violations;
    }
} scheme;

CurveDataset random_dataset(Rng& rng, std::size_t n, Eigen::Index d, Eigen::Index max_m) {
    std::vector<Curve> cs;
    for (std::size_t i = 0; i < n; ++i) {
        cs.push_back(test::random_curve(rng, d, Eigen::Index(1 + rng.below(std::uint64_t(max_m)))));
    }
    return CurveDataset(cs);
}

Outcome c1_frechet_cases() {
    std::ifstream in(kFixtures + "/frechet_cases.jsonl");
    std::string line;
    std::size_t cases = 0, bad = 0;
    double worst = 0.0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json rec = json::parse(line);
        auto curve = [](const json& verts) {
            std::vector<Point<double>> pts;
            for (const auto& v : verts) {
                Point<double> p(static_cast<Eigen::Index>(v.size()));
                for (std::size_t i = 0; i < v.size(); ++i) p[Eigen::Index(i)] = v[i].get<double>();
                pts.push_back(p);
            }
            return Curve::from_points(pts);
        };
        const double expected = rec["distance"].get<double>();
        const double got = frechet_distance(curve(rec["sigma"]), curve(rec["tau"]));
        const double err = std::abs(got - expected) / std::max(expected, 1e-300);
        worst = std::max(worst, expected > 0 ? err : std::abs(got));
        if (expected > 0 ? err > 1e-6 : got > 1e-12) ++bad;
        ++cases;
    }
    return {cases == 20 && bad == 0,
            std::to_string(cases) + " cases, " + std::to_string(bad) + " off, max rel err " + num(worst)};
}

Outcome c2_frechet_properties() {
    Rng rng(2);
    std::size_t asym = 0, mono = 0, bracket = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto d = Eigen::Index(1 + rng.below(3));
        const Curve a = test::random_curve(rng, d, Eigen::Index(1 + rng.below(30)));
        const Curve b = test::random_curve(rng, d, Eigen::Index(1 + rng.below(30)));
        const double ab = frechet_distance(a, b);
        if (ab != frechet_distance(b, a)) ++asym;
        if (!(frechet_lower_bound(a, b) <= ab && ab <= discrete_frechet(a, b))) ++bracket;
        // Decisions along an increasing ladder of radii must switch at most once.
        bool seen_true = false;
        for (int s = 0; s <= 8; ++s) {
            const double eps = ab * (0.9 + 0.025 * s) + (s == 8 ? 1.0 : 0.0);
            const bool ok = frechet_decide(a, b, eps);
            if (seen_true && !ok) ++mono;
            seen_true = seen_true || ok;
        }
        if (!frechet_decide(a, b, ab)) ++mono;
    }
    return {asym == 0 && mono == 0 && bracket == 0, "1000 pairs: asymmetric " + std::to_string(asym) +
                                                        ", monotonicity " + std::to_string(mono) + ", bracket " +
                                                        std::to_string(bracket)};
}

Outcome c3_simplify() {
    Rng rng(3);
    std::size_t bad = 0, checks = 0;
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const auto d = Eigen::Index(1 + rng.below(2));
        const Curve tau = test::random_curve(rng, d, Eigen::Index(2 + rng.below(7)));
        for (std::size_t ell = 2; ell <= 5; ++ell) {
            const double got = simplify(tau, ell).error;
            const double opt = exhaustive_simplification_error(tau, ell);
            if (!(got <= 4.0 * opt + 1e-6)) ++bad;
            if (opt > 0) worst = std::max(worst, got / opt);
            ++checks;
        }
    }
    return {bad == 0, std::to_string(checks) + " (curve, ell) pairs, " + std::to_string(bad) +
                          " violations, max ratio " + num(worst)};
}

Outcome c4_closed_form() {
    Rng rng(4);
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 3 + rng.below(20);
        const auto T = random_dataset(rng, n, Eigen::Index(1 + rng.below(3)), 6);
        const std::size_t k = 1 + rng.below(std::min<std::uint64_t>(5, n - 1));
        std::vector<Curve> cs;
        for (std::size_t i = 0; i < k; ++i) cs.push_back(T[i]);
        ClusteringResult r = voronoi_partition(T, CenterSet(cs));
        r.approx_factor = 1.0 + rng.uniform(0.0, 60.0);
        const auto prof = sensitivity_profile(r);
        scheme.add(prof);
        const double closed = total_sensitivity_bound(prof.k_prime, prof.alpha_hat);
        worst = std::max(worst, std::abs(prof.gamma_total - closed) / closed);
    }
    const double trivial = total_sensitivity_bound(1, 1.0) - (5.0 + 2.0 * std::sqrt(6.0));
    return {worst <= 1e-9 && std::abs(trivial) <= 1e-12,
            "500 instances, max rel deviation " + num(worst) + ", Gamma(1,1) - (5+2 sqrt 6) = " + num(trivial)};
}

Outcome c5_sensitivity() {
    Rng rng(5);
    std::size_t bad = 0;
    double slack = INFINITY;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 3 + rng.below(4);
        const auto T = random_dataset(rng, n, 1, 3);
        CoresetConfig cfg;
        cfg.k = 1 + rng.below(2);
        cfg.ell = 2;
        const auto prof = sensitivity_profile(coreset_approximation(T, cfg));
        scheme.add(prof);
        const auto lower = sensitivity_lower_bound(T, cfg.k, cfg.ell, 100000, std::uint64_t(t));
        for (std::size_t j = 0; j < n; ++j) {
            if (prof.gamma[j] < lower[j]) ++bad;
            slack = std::min(slack, prof.gamma[j] / lower[j]);
        }
    }
    return {bad == 0, "100 instances, " + std::to_string(bad) + " curves below the sampled sensitivity, min gamma/lower " +
                          num(slack)};
}

/// Center sets for criteria 7 and 8. Each center has 1..ell vertices; with
/// probability 1/2 it is a jittered simplification of a random input curve,
/// otherwise its vertices are uniform in the data bounding box.
std::vector<CenterSet> random_center_sets(const CurveDataset& T, std::size_t count, std::size_t k, std::size_t ell,
                                          std::uint64_t seed) {
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(T.dim, INFINITY), hi = -lo;
    for (const auto& c : T.curves) {
        lo = lo.cwiseMin(c.vertices().rowwise().minCoeff());
        hi = hi.cwiseMax(c.vertices().rowwise().maxCoeff());
    }
    Rng rng(seed);
    std::vector<CenterSet> out;
    for (std::size_t s = 0; s < count; ++s) {
        std::vector<Curve> cs;
        for (std::size_t c = 0; c < k; ++c) {
            const auto m = Eigen::Index(1 + rng.below(ell));
            if (rng.uniform() < 0.5) {
                VertexMatrix<double> v = simplify(T[rng.below(T.size())], std::size_t(m)).curve.vertices();
                for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] += rng.normal();
                cs.push_back(normalize(v));
            } else {
                VertexMatrix<double> v(T.dim, m);
                for (Eigen::Index j = 0; j < m; ++j) {
                    for (Eigen::Index i = 0; i < T.dim; ++i) v(i, j) = rng.uniform(lo[i], hi[i]);
                }
                cs.push_back(normalize(v));
            }
        }
        out.emplace_back(std::move(cs));
    }
    return out;
}

/// The fixed instance of criteria 7 and 8, its profile, and distances from every
/// curve to every center of the 500 random sets (set s owns columns 3s..3s+2).
struct CoresetInstance {
    CurveDataset T;
    SensitivityProfile profile;
    std::vector<CenterSet> sets;
    Eigen::MatrixXd dist;
    std::vector<double> costs;

    static const CoresetInstance& get() {
        static const CoresetInstance inst = [] {
            CoresetInstance c;
            SyntheticConfig g;
            g.n = 300;
            g.k = 3;
            g.dim = 2;
            g.complexity = 10;
            g.seed = 7;
            c.T = generate_clusters(g).data;
            CoresetConfig cfg;
            cfg.k = 3;
            cfg.ell = 4;
            c.profile = sensitivity_profile(coreset_approximation(c.T, cfg));
            scheme.add(c.profile);
            c.sets = random_center_sets(c.T, 500, 3, 4, 8);
            std::vector<Curve> centers;
            for (const auto& s : c.sets) centers.insert(centers.end(), s.centers.begin(), s.centers.end());
            c.dist = distance_matrix(c.T.curves, centers);
            for (std::size_t s = 0; s < c.sets.size(); ++s) c.costs.push_back(c.set_cost_all(s));
            return c;
        }();
        return inst;
    }

    double nearest(std::size_t j, std::size_t s) const {
        return dist.row(Eigen::Index(j)).segment(Eigen::Index(3 * s), 3).minCoeff();
    }
    double set_cost_all(std::size_t s) const {
        double total = 0.0;
        for (std::size_t j = 0; j < T.size(); ++j) total += nearest(j, s);
        return total;
    }
    double pcost(const WeightedCurveSet& S, std::size_t s) const {
        const auto w = S.pooled_weights();
        double total = 0.0;
        for (std::size_t p = 0; p < w.size(); ++p) total += w[p] * nearest(S.source_index[p], s);
        return total;
    }
    double max_error(const WeightedCurveSet& S) const {
        double worst = 0.0;
        for (std::size_t s = 0; s < sets.size(); ++s) worst = std::max(worst, relative_error(pcost(S, s), costs[s]));
        return worst;
    }
};

Outcome c7_unbiased() {
    const auto& I = CoresetInstance::get();
    const std::size_t fixed = 0;
    const double full = I.costs[fixed];
    std::vector<double> p;
    for (std::uint64_t seed = 1; seed <= 500; ++seed) p.push_back(I.pcost(sample_coreset(I.T, I.profile, 80, seed), fixed));
    // The lookup path must agree with a direct weighted_cost evaluation.
    const double direct = weighted_cost(sample_coreset(I.T, I.profile, 80, 1), I.sets[fixed]);
    double mean = 0.0, var = 0.0;
    for (double v : p) mean += v / double(p.size());
    for (double v : p) var += (v - mean) * (v - mean) / double(p.size() - 1);
    const double se = std::sqrt(var / double(p.size()));
    const bool agree = std::abs(direct - p[0]) <= 1e-9 * direct;
    return {agree && std::abs(mean - full) <= 3.0 * se,
            "mean pcost " + num(mean) + " vs cost " + num(full) + ", SE " + num(se) + ", |diff|/SE " +
                num(std::abs(mean - full) / se)};
}

Outcome c8_error() {
    const auto& I = CoresetInstance::get();
    const double at80 = I.max_error(sample_coreset(I.T, I.profile, 80, 2024));
    std::vector<double> e40, e160;
    for (std::uint64_t r = 0; r < 50; ++r) {
        e40.push_back(I.max_error(sample_coreset(I.T, I.profile, 40, 10000 + r)));
        e160.push_back(I.max_error(sample_coreset(I.T, I.profile, 160, 20000 + r)));
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return 0.5 * (v[(v.size() - 1) / 2] + v[v.size() / 2]);
    };
    const double m40 = median(e40), m160 = median(e160);
    return {at80 <= 0.15 && m160 <= m40, "max error at |S|=80 " + num(at80) + "; median max error |S|=40 " +
                                             num(m40) + ", |S|=160 " + num(m160)};
}

Outcome c9_median1() {
    std::size_t good = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SyntheticConfig g;
        g.n = 20;
        g.k = 1;
        g.dim = 1;
        g.complexity = 6;
        g.spread = 1.0;
        g.seed = seed;
        const CurveDataset T = generate_clusters(g).data;
        Median1Config cfg;
        cfg.epsilon = 0.5;
        cfg.delta = 0.2;
        cfg.ell = 2;
        cfg.seed = seed;
        const Curve c = one_median_5eps(T, cfg);
        const double got = cost(T, CenterSet({c}));
        const double opt = grid_median_oracle(T, 1).cost;
        const double ratio = got / opt;
        worst = std::max(worst, ratio);
        if (got <= (5.0 + cfg.epsilon) * opt) ++good;
    }
    return {good >= 18, std::to_string(good) + "/20 runs within (5+eps) OPT, worst ratio " + num(worst)};
}

Outcome c10_determinism() {
    test::TempDir tmp;
    const std::string data = (tmp / "data.csv").string();
    const std::string line = kFixtures + "/median1_line.csv";
    {
        const auto r = test::run(kCli, "generate --n 40 --k 2 --dim 2 --m 6 --seed 9 --output " + data, tmp);
        if (r.code != 0) return {false, "generate failed: " + r.err};
    }
    std::ofstream(tmp / "a.csv") << "id,x1,x2\na,0,0\na,2,1\na,3,0\n";
    std::ofstream(tmp / "b.csv") << "id,x1,x2\nb,0,1\nb,3,1\n";
    struct Cmd {
        std::string name, args;
        std::vector<std::string> files;  // outputs written next to stdout
    };
    const std::string out = (tmp / "out").string();
    const std::vector<Cmd> cmds = {
        {"generate", "generate --n 25 --k 3 --dim 2 --m 5 --seed 3 --format jsonl", {}},
        {"distance", "distance --input " + (tmp / "a.csv").string() + " --input " + (tmp / "b.csv").string(), {}},
        {"cluster", "cluster --input " + data + " --k 2 --ell 3 --seed 5", {}},
        {"cluster local_search", "cluster --input " + data + " --k 2 --ell 3 --mode local_search --seed 5", {}},
        {"coreset", "coreset --input " + data + " --k 2 --ell 3 --epsilon 0.4 --coreset-size 50 --seed 6 --output " + out,
         {out, out + ".meta.json"}},
        {"median1", "median1 --input " + line + " --seed 7", {}},
        {"verify", "verify --suite all --seed 8", {}},
    };
    std::vector<std::string> mismatched;
    for (const auto& c : cmds) {
        std::string reference;
        bool ok = true;
        for (int threads : {1, 4}) {
            for (int rep = 0; rep < 3; ++rep) {
                const auto r = test::run(kCli, c.args + " --threads " + std::to_string(threads), tmp);
                std::string blob = std::to_string(r.code) + "\n" + r.out;
                for (const auto& f : c.files) blob += "\n--\n" + test::read_file(f);
                if (r.code != 0) ok = false;
                if (reference.empty()) {
                    reference = blob;
                } else if (blob != reference) {
                    ok = false;
                }
            }
        }
        if (!ok) mismatched.push_back(c.name);
    }
    std::string names;
    for (const auto& m : mismatched) names += (names.empty() ? "" : ", ") + m;
    return {mismatched.empty(), std::to_string(cmds.size()) + " commands x 3 runs x threads {1,4}" +
                                    (mismatched.empty() ? ", all identical" : "; differing or failing: " + names)};
}

struct Criterion {
    int id;
    std::string name;
    double budget_s;  // 0: no runtime bound
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    spdlog::set_level(spdlog::level::err);
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    const std::vector<Criterion> criteria = {
        {1, "frechet closed-form cases", 1, c1_frechet_cases},
        {2, "frechet properties", 30, c2_frechet_properties},
        {3, "simplification 4-factor", 120, c3_simplify},
        {4, "total sensitivity closed form", 60, c4_closed_form},
        {5, "sensitivity upper bounds", 300, c5_sensitivity},
        {6, "lambda rounding scheme", 0,
         [] {
             // Make sure the instance of criteria 7 and 8 has contributed its profile.
             // Building it is charged to this criterion.
             CoresetInstance::get();
             return Outcome{scheme.violations == 0, std::to_string(scheme.profiles) + " profiles, " +
                                                        std::to_string(scheme.violations) + " violations"};
         }},
        {7, "coreset unbiasedness", 600, c7_unbiased},
        {8, "coreset error", 900, c8_error},
        {9, "one-median end to end", 1200, c9_median1},
        {10, "determinism", 0, c10_determinism},
    };

    bool all = true;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.budget_s == 0 || secs < c.budget_s;
        const bool pass = o.pass && in_time;
        all = all && pass;
        std::printf("criterion %2d %s: %s [%s] %.2f s%s\n", c.id, pass ? "PASS" : "FAIL", c.name.c_str(),
                    o.detail.c_str(), secs,
                    in_time ? "" : (" (budget " + num(c.budget_s) + " s)").c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
