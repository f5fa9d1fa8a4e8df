#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>

#include "klmedian/coreset.hpp"
#include "klmedian/curve_io.hpp"
#include "klmedian/median1.hpp"
#include "klmedian/oracles.hpp"
#include "klmedian/random.hpp"
#include "klmedian/simplify.hpp"

namespace klmedian::cli {
namespace {

using json = nlohmann::json;

json check(const std::string& name, bool pass, json extra = json::object()) {
    extra["name"] = name;
    extra["pass"] = pass;
    return extra;
}

Curve curve_from_json(const json& verts) {
    if (!verts.is_array() || verts.empty()) throw ParseError("vertex list must be a non-empty array", 0);
    std::vector<Point<double>> pts;
    for (const auto& v : verts) {
        if (!v.is_array() || v.empty()) throw ParseError("vertex must be a non-empty array", 0);
        Point<double> p(static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw ParseError("non-numeric coordinate", 0);
            p[Eigen::Index(i)] = v[i].get<double>();
        }
        pts.push_back(std::move(p));
    }
    return normalize(Curve::from_points(pts), 0.0);
}

/// Loads a fixture, turning any failure into a failed check named after the file.
template <typename F>
bool load_fixture(const std::string& dir, const std::string& file, json& checks, F&& body) {
    try {
        body(dir + "/" + file);
        return true;
    } catch (const std::exception& e) {
        checks.push_back(check("load " + file, false, {{"error", e.what()}}));
        return false;
    }
}

CurveDataset read_dataset(const std::string& path) {
    const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
    return load_dataset_file(path, csv ? DatasetFormat::csv : DatasetFormat::jsonl);
}

Curve random_curve(Rng& rng, Eigen::Index d, Eigen::Index m) {
    VertexMatrix<double> v(d, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) v(i, j) = rng.uniform(-5.0, 5.0);
    }
    return normalize(v);
}

json suite_frechet(const std::string& dir, std::uint64_t seed) {
    json checks = json::array();
    struct Case {
        std::string id;
        Curve sigma, tau;
        double expected;
    };
    std::vector<Case> cases;
    load_fixture(dir, "frechet_cases.jsonl", checks, [&](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InvalidInput("cannot open '" + path + "'");
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            try {
                const json rec = json::parse(line);
                cases.push_back({rec.at("id").get<std::string>(), curve_from_json(rec.at("sigma")),
                                 curve_from_json(rec.at("tau")), rec.at("distance").get<double>()});
            } catch (const std::exception& e) {
                throw ParseError(e.what(), line_no);
            }
        }
        if (cases.empty()) throw ParseError("no cases", line_no);
    });
    for (const auto& c : cases) {
        const double v = frechet_distance(c.sigma, c.tau);
        const bool ok = std::abs(v - c.expected) <= 1e-6 * std::max(1.0, c.expected);
        checks.push_back(check("case " + c.id, ok, {{"measured", v}, {"expected", c.expected}}));
    }

    Rng rng(seed);
    std::size_t asym = 0, sandwich = 0, monotone = 0;
    const std::size_t pairs = 200;
    for (std::size_t t = 0; t < pairs; ++t) {
        const auto d = Eigen::Index(1 + rng.below(3));
        const Curve a = random_curve(rng, d, Eigen::Index(1 + rng.below(12)));
        const Curve b = random_curve(rng, d, Eigen::Index(1 + rng.below(12)));
        const double ab = frechet_distance(a, b), ba = frechet_distance(b, a);
        if (ab != ba) ++asym;
        if (!(frechet_lower_bound(a, b) <= ab && ab <= discrete_frechet(a, b))) ++sandwich;
        const double e1 = rng.uniform(0.0, 10.0), e2 = e1 + rng.uniform(0.0, 2.0);
        if (frechet_decide(a, b, e1) && !frechet_decide(a, b, e2)) ++monotone;
    }
    checks.push_back(check("symmetry", asym == 0, {{"violations", asym}, {"pairs", pairs}}));
    checks.push_back(check("sandwich", sandwich == 0, {{"violations", sandwich}, {"pairs", pairs}}));
    checks.push_back(check("decision monotone", monotone == 0, {{"violations", monotone}, {"pairs", pairs}}));
    return checks;
}

json suite_simplify(const std::string& dir, std::uint64_t) {
    json checks = json::array();
    CurveDataset T;
    if (!load_fixture(dir, "simplify_curves.jsonl", checks, [&](const std::string& p) { T = read_dataset(p); })) {
        return checks;
    }
    for (std::size_t ell : {2u, 3u}) {
        double worst = 0.0;
        std::size_t bad = 0;
        for (const auto& tau : T.curves) {
            const auto r = simplify(tau, ell);
            const double opt = exhaustive_simplification_error(tau, ell);
            worst = std::max(worst, opt > 0 ? r.error / opt : (r.error > 1e-6 ? INFINITY : 0.0));
            const bool shape = std::size_t(r.curve.size()) <= ell && r.curve.front() == tau.front() &&
                               r.curve.back() == tau.back();
            if (!(r.error <= 4.0 * opt + 1e-6) || !shape) ++bad;
        }
        checks.push_back(check("4-factor ell=" + std::to_string(ell), bad == 0,
                               {{"violations", bad}, {"curves", T.size()}, {"max_ratio", worst}}));
    }
    return checks;
}

json suite_sensitivity(const std::string& dir, std::uint64_t seed) {
    json checks = json::array();
    CurveDataset T;
    if (!load_fixture(dir, "sensitivity_tiny.csv", checks, [&](const std::string& p) { T = read_dataset(p); })) {
        return checks;
    }
    CoresetConfig cfg;
    cfg.k = 2;
    cfg.ell = 2;
    const SensitivityProfile prof = sensitivity_profile(coreset_approximation(T, cfg));
    const double closed = total_sensitivity_bound(prof.k_prime, prof.alpha_hat);
    checks.push_back(check("total sensitivity closed form",
                           std::abs(prof.gamma_total - closed) <= 1e-9 * closed,
                           {{"Gamma", prof.gamma_total}, {"expected", closed}}));
    const double n = double(T.size());
    bool scheme = true;
    double psi_sum = 0.0;
    for (std::size_t j = 0; j < prof.size(); ++j) {
        const double scaled = prof.lambda[j] * n;
        scheme = scheme && scaled == std::round(scaled) && prof.gamma[j] <= prof.lambda[j] &&
                 prof.lambda[j] <= 2.0 * prof.gamma[j] + 1.0 / n;
        psi_sum += prof.psi[j];
    }
    checks.push_back(check("lambda rounding", scheme));
    checks.push_back(check("psi sums to one", std::abs(psi_sum - 1.0) <= 1e-12, {{"sum", psi_sum}}));
    const auto lb = sensitivity_lower_bound(T, cfg.k, cfg.ell, 20000, seed);
    std::size_t bad = 0;
    double slack = INFINITY;
    for (std::size_t j = 0; j < lb.size(); ++j) {
        if (prof.gamma[j] < lb[j]) ++bad;
        slack = std::min(slack, prof.gamma[j] - lb[j]);
    }
    checks.push_back(check("gamma bounds sampled sensitivity", bad == 0, {{"violations", bad}, {"min_slack", slack}}));
    return checks;
}

json suite_coreset(const std::string& dir, std::uint64_t seed) {
    json checks = json::array();
    CurveDataset T;
    if (!load_fixture(dir, "coreset_clusters.csv", checks, [&](const std::string& p) { T = read_dataset(p); })) {
        return checks;
    }
    CoresetConfig cfg;
    cfg.k = 3;
    cfg.ell = 3;
    cfg.epsilon = 0.2;
    cfg.delta = 0.1;
    const SensitivityProfile prof = sensitivity_profile(coreset_approximation(T, cfg));
    const CenterSet C({T[0], T[1], T[2]});
    const double full = cost(T, C);
    checks.push_back(check("unit weights equal cost", weighted_cost(WeightedCurveSet::unit(T), C) == full));

    const std::size_t reps = 100, size = 40;
    std::vector<double> p(reps);
    bool shape = true;
    for (std::size_t r = 0; r < reps; ++r) {
        const WeightedCurveSet S = sample_coreset(T, prof, size, seed + r);
        shape = shape && S.size() == size &&
                std::all_of(S.entries.begin(), S.entries.end(), [](const WeightedEntry& e) { return e.weight > 0.0; });
        p[r] = weighted_cost(S, C);
    }
    const double mean = std::accumulate(p.begin(), p.end(), 0.0) / double(reps);
    double var = 0.0;
    for (double v : p) var += (v - mean) * (v - mean);
    const double se = std::sqrt(var / double(reps - 1) / double(reps));
    checks.push_back(check("entries and weights", shape));
    checks.push_back(check("unbiased within 3 standard errors", std::abs(mean - full) <= 3.0 * se,
                           {{"mean", mean}, {"cost", full}, {"standard_error", se}}));
    return checks;
}

json suite_median1(const std::string& dir, std::uint64_t seed) {
    json checks = json::array();
    CurveDataset T;
    if (!load_fixture(dir, "median1_line.csv", checks, [&](const std::string& p) { T = read_dataset(p); })) {
        return checks;
    }
    Median1Config cfg;
    cfg.epsilon = 0.5;
    cfg.delta = 0.2;
    cfg.ell = 2;
    cfg.seed = seed;
    Median1Trace tr;
    const Curve c = one_median_5eps(T, cfg, &tr);
    const double got = cost(T, CenterSet({c}));
    const double opt = grid_median_oracle(T, 1).cost;
    checks.push_back(check("within (5+eps) of grid optimum", got <= (5.0 + cfg.epsilon) * opt + 1e-9,
                           {{"cost", got}, {"oracle", opt}, {"ratio", opt > 0 ? got / opt : 0.0}}));
    checks.push_back(check("complexity at most 2 ell - 2", std::size_t(c.size()) <= 2 * cfg.ell - 2));
    if (!tr.short_circuit) {
        const double e = tr.epsilon_prime;
        const bool ok = std::abs(tr.delta_upper * (1.0 - e) - tr.delta_cost) <= 1e-14 * tr.delta_cost &&
                        std::abs(tr.delta_lower * (1.0 + e) * tr.alpha_hat - tr.delta_cost) <= 1e-14 * tr.delta_cost;
        checks.push_back(check("trace identities", ok));
    }
    return checks;
}

}  // namespace

json run_suite(const std::string& suite, const std::string& fixture_dir, std::uint64_t seed) {
    static const std::map<std::string, std::function<json(const std::string&, std::uint64_t)>> suites = {
        {"frechet", suite_frechet},         {"simplify", suite_simplify}, {"sensitivity", suite_sensitivity},
        {"coreset", suite_coreset},         {"median1", suite_median1},
    };
    const auto it = suites.find(suite);
    if (it == suites.end()) throw InvalidInput("unknown suite '" + suite + "'");
    json report;
    report["suite"] = suite;
    report["checks"] = it->second(fixture_dir, seed);
    bool pass = true;
    for (const auto& c : report["checks"]) pass = pass && c["pass"].get<bool>();
    report["pass"] = pass;
    return report;
}

}  // namespace klmedian::cli
