#include "klmedian/coreset.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "klmedian/random.hpp"

namespace klmedian {
namespace {

/// 2^ceil(log2 g) for g > 0, exact.
double power_of_two_ceil(double g) {
    int e = 0;
    const double f = std::frexp(g, &e);  // g = f 2^e, f in [0.5, 1)
    return f == 0.5 ? g : std::ldexp(1.0, e);
}

constexpr std::uint64_t kSamplingTag = 0x636f72657365ULL;

}  // namespace

double total_sensitivity_bound(std::size_t k_prime, double alpha) {
    const double k = double(k_prime);
    return 2.0 * k + 2.0 * std::sqrt(6.0 * alpha * k) + 3.0 * alpha;
}

SensitivityProfile sensitivity_profile(const CurveDataset& T, const ClusteringResult& approx) {
    if (approx.assignment.size() != T.size() || approx.distances.size() != T.size()) {
        return sensitivity_profile(voronoi_partition(T, approx.centers));
    }
    return sensitivity_profile(approx);
}

SensitivityProfile sensitivity_profile(const ClusteringResult& approx) {
    const std::size_t n = approx.assignment.size();
    if (n == 0 || approx.distances.size() != n) throw InvalidInput("sensitivity_profile: approximation covers no curves");
    const double alpha = approx.approx_factor;
    if (!(alpha >= 1.0)) throw InvalidInput("sensitivity_profile: approximation factor must be at least 1");

    SensitivityProfile prof;
    prof.source = approx;
    prof.alpha_hat = alpha;
    const std::vector<std::size_t> sizes = approx.cell_sizes();
    std::vector<double> cell_cost(sizes.size(), 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        cell_cost[approx.assignment[j]] += approx.distances[j];
        total += approx.distances[j];
    }
    prof.k_prime = std::size_t(std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; }));
    const double kp = double(prof.k_prime);

    prof.gamma.resize(n);
    if (total == 0.0) {
        prof.degenerate = true;
        std::fill(prof.gamma.begin(), prof.gamma.end(), total_sensitivity_bound(prof.k_prime, alpha) / double(n));
    } else {
        const double a = 1.0 + std::sqrt(2.0 * kp / (3.0 * alpha));
        const double b = 1.0 + std::sqrt(3.0 * alpha / (2.0 * kp));
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t i = approx.assignment[j];
            const double v = double(sizes[i]);
            prof.gamma[j] = a * (alpha * approx.distances[j] / total + 2.0 * alpha * cell_cost[i] / (total * v)) + b * 2.0 / v;
        }
    }

    prof.lambda.resize(n);
    prof.lambda_scaled.resize(n);
    prof.psi.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double scaled = std::max(1.0, std::ceil(double(n) * power_of_two_ceil(prof.gamma[j])));
        if (!(scaled < 0x1.0p62)) throw CapacityError("sensitivity_profile: scaled sensitivity", scaled, 0x1.0p62);
        prof.lambda_scaled[j] = std::uint64_t(scaled);
        prof.lambda[j] = scaled / double(n);
        prof.lambda_scaled_total += prof.lambda_scaled[j];
        prof.gamma_total += prof.gamma[j];
    }
    prof.lambda_total = double(prof.lambda_scaled_total) / double(n);
    for (std::size_t j = 0; j < n; ++j) prof.psi[j] = double(prof.lambda_scaled[j]) / double(prof.lambda_scaled_total);
    return prof;
}

std::size_t coreset_sample_size(std::size_t n, std::size_t d, std::size_t m, std::size_t k, std::size_t ell,
                                double epsilon, double delta, double c_sample) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
    if (!(c_sample > 0.0)) throw InvalidInput("c_sample must be positive");
    const double K = double(k), D = double(d), L = double(ell), lk = std::log(K);
    const double inner = D * D * L * L * K * std::log(D * L * double(m)) * std::log(K * double(n)) * lk * lk +
                         std::log(2.0 / delta);
    const double size = std::max(1.0, c_sample * std::ceil(K * inner / (epsilon * epsilon)));
    constexpr double cap = 1e10;
    if (!(size <= cap)) throw CapacityError("coreset sample size", size, cap);
    if (size > double(n) * 1e3) {
        spdlog::warn("coreset sample size {} exceeds 1000 times the input size {}", size, n);
    }
    return std::size_t(size);
}

WeightedCurveSet sample_coreset(const CurveDataset& T, const SensitivityProfile& profile, std::size_t sample_size,
                                std::uint64_t seed) {
    const std::size_t n = T.size();
    if (profile.size() != n) throw InvalidInput("sample_coreset: profile does not match the dataset");
    if (sample_size < 1) throw InvalidInput("sample_coreset: sample size must be positive");
    std::vector<std::uint64_t> prefix(n);
    std::uint64_t acc = 0;
    for (std::size_t j = 0; j < n; ++j) prefix[j] = (acc += profile.lambda_scaled[j]);

    const SubstreamSampler stream(seed, kSamplingTag);
    WeightedCurveSet ws;
    std::vector<std::size_t> slot(n, std::numeric_limits<std::size_t>::max());
    ws.entries.reserve(sample_size);
    const double total = double(acc);
    for (std::size_t t = 0; t < sample_size; ++t) {
        const std::uint64_t u = stream.below(t, acc);
        const std::size_t j = std::size_t(std::upper_bound(prefix.begin(), prefix.end(), u) - prefix.begin());
        if (slot[j] == std::numeric_limits<std::size_t>::max()) {
            slot[j] = ws.curves.size();
            ws.curves.push_back(T[j]);
            ws.source_index.push_back(j);
        }
        ws.entries.push_back({slot[j], total / (double(sample_size) * double(profile.lambda_scaled[j]))});
    }
    ws.meta.seed = seed;
    ws.meta.n = n;
    ws.meta.sample_size = sample_size;
    ws.meta.gamma_total = profile.gamma_total;
    ws.meta.lambda_total = profile.lambda_total;
    ws.meta.alpha_hat = profile.alpha_hat;
    return ws;
}

ClusteringResult coreset_approximation(const CurveDataset& T, const CoresetConfig& cfg, const FrechetOptions& opts) {
    if (cfg.k == 1) return one_median_bootstrap(T, cfg.ell, opts);
    ConstantFactorConfig c;
    c.k = cfg.k;
    c.ell = cfg.ell;
    c.delta = cfg.delta;
    c.seed = cfg.seed;
    c.mode = cfg.mode;
    c.subset_cap = cfg.subset_cap;
    return kl_median_constant_factor(T, c, opts);
}

CoresetBuild build_coreset(const CurveDataset& T, const CoresetConfig& cfg, const FrechetOptions& opts) {
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1)");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
    if (cfg.k < 1 || cfg.k > T.size()) throw InvalidInput("need 1 <= k <= n");
    if (cfg.ell < 1) throw InvalidInput("ell must be at least 1");
    const std::size_t size =
        cfg.sample_size ? *cfg.sample_size
                        : coreset_sample_size(T.size(), std::size_t(T.dim), std::size_t(T.max_complexity), cfg.k, cfg.ell,
                                              cfg.epsilon, cfg.delta, cfg.c_sample);
    if (size < 1) throw InvalidInput("coreset size must be positive");
    if (cfg.sample_size && double(size) > double(T.size()) * 1e3) {
        spdlog::warn("coreset sample size {} exceeds 1000 times the input size {}", size, T.size());
    }
    CoresetBuild out;
    out.profile = sensitivity_profile(coreset_approximation(T, cfg, opts));
    spdlog::debug("sensitivity profile: Gamma={} Lambda={} alpha_hat={} k'={}", out.profile.gamma_total,
                  out.profile.lambda_total, out.profile.alpha_hat, out.profile.k_prime);
    out.coreset = sample_coreset(T, out.profile, size, cfg.seed);
    out.coreset.meta.k = cfg.k;
    out.coreset.meta.ell = cfg.ell;
    out.coreset.meta.epsilon = cfg.epsilon;
    out.coreset.meta.delta = cfg.delta;
    return out;
}

double relative_error(double pcost, double cost) {
    if (cost == 0.0) return pcost == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(pcost - cost) / cost;
}

CoresetErrorStats coreset_error(const CurveDataset& T, const WeightedCurveSet& S, const std::vector<CenterSet>& centers,
                                const FrechetOptions& opts) {
    CoresetErrorStats st;
    st.errors.reserve(centers.size());
    double finite_sum = 0.0;
    for (const auto& C : centers) {
        const double e = relative_error(weighted_cost(S, C, opts), cost(T, C, opts));
        st.errors.push_back(e);
        if (std::isinf(e)) {
            ++st.infinite;
        } else {
            finite_sum += e;
        }
        st.max = std::max(st.max, e);
    }
    const std::size_t finite = st.errors.size() - st.infinite;
    st.mean = st.infinite > 0 ? std::numeric_limits<double>::infinity() : (finite ? finite_sum / double(finite) : 0.0);
    return st;
}

}  // namespace klmedian
