#include "klmedian/synthetic.hpp"

#include <string>

#include "klmedian/random.hpp"

namespace klmedian {

SyntheticDataset generate_clusters(const SyntheticConfig& cfg) {
    if (cfg.n < 1 || cfg.k < 1 || cfg.k > cfg.n) throw InvalidInput("generator: need 1 <= k <= n");
    if (cfg.dim < 1 || cfg.complexity < 1) throw InvalidInput("generator: dimension and complexity must be positive");
    if (!(cfg.spread >= 0.0) || !(cfg.extent >= 0.0)) throw InvalidInput("generator: spread and extent must be non-negative");
    Rng rng(cfg.seed);
    const auto d = Eigen::Index(cfg.dim), m = Eigen::Index(cfg.complexity);

    SyntheticDataset out;
    for (std::size_t c = 0; c < cfg.k; ++c) {
        VertexMatrix<double> v(d, m);
        for (Eigen::Index j = 0; j < m; ++j) {
            for (Eigen::Index i = 0; i < d; ++i) v(i, j) = rng.uniform(0.0, cfg.extent);
        }
        v.row(0).array() += double(c) * cfg.separation;
        out.prototypes.emplace_back(std::move(v), "prototype_" + std::to_string(c));
    }
    std::vector<Curve> curves;
    std::vector<std::size_t> member(cfg.k, 0);
    for (std::size_t t = 0; t < cfg.n; ++t) {
        const std::size_t c = t % cfg.k;
        VertexMatrix<double> v = out.prototypes[c].vertices();
        for (Eigen::Index j = 0; j < m; ++j) {
            for (Eigen::Index i = 0; i < d; ++i) v(i, j) += cfg.spread * rng.normal();
        }
        curves.push_back(normalize(v, kDefaultCollinearityTol, "c" + std::to_string(c) + "_" + std::to_string(member[c]++)));
        out.labels.push_back(c);
    }
    out.data = CurveDataset(std::move(curves));
    return out;
}

}  // namespace klmedian
