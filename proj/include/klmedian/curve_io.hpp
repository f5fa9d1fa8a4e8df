#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "klmedian/curve.hpp"

namespace klmedian {

enum class DatasetFormat { csv, jsonl };

DatasetFormat parse_format(const std::string& name);

/// One occurrence of a curve in a weighted multiset.
struct WeightedEntry {
    std::size_t curve = 0;  // index into WeightedCurveSet::curves
    double weight = 0.0;
};

/// Provenance of a sampled coreset, written to the JSON sidecar.
struct CoresetMetadata {
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t ell = 0;
    double epsilon = 0.0;
    double delta = 0.0;
    std::size_t sample_size = 0;
    double gamma_total = 0.0;
    double lambda_total = 0.0;
    double alpha_hat = 0.0;
};

/// A multiset of curves with strictly positive weights. Entries reference a
/// pool of distinct curves; the same pool curve may occur in several entries.
struct WeightedCurveSet {
    std::vector<Curve> curves;
    std::vector<WeightedEntry> entries;
    /// For each pool curve, its index in the dataset it was drawn from (empty if unknown).
    std::vector<std::size_t> source_index;
    CoresetMetadata meta;

    std::size_t size() const { return entries.size(); }
    const Curve& curve_of(const WeightedEntry& e) const { return curves[e.curve]; }

    /// Sum of entry weights per pool curve, in pool order.
    std::vector<double> pooled_weights() const;

    /// Each dataset curve once with weight 1.
    static WeightedCurveSet unit(const CurveDataset& T);
};

/// Reads a dataset. Curves are grouped by id in order of first appearance,
/// vertices kept in file order, then normalized with `collinearity_tol`.
CurveDataset load_dataset(std::istream& in, DatasetFormat format, double collinearity_tol = kDefaultCollinearityTol);
CurveDataset load_dataset_file(const std::string& path, DatasetFormat format,
                               double collinearity_tol = kDefaultCollinearityTol);

void save_dataset(const CurveDataset& T, std::ostream& out, DatasetFormat format);

/// JSONL, one record per entry: {"id", "vertices", "weight"}. Refuses non-positive weights.
void save_weighted_set(const WeightedCurveSet& ws, std::ostream& out);
WeightedCurveSet load_weighted_set(std::istream& in);

/// Shortest decimal form that reads back to the same double (17 significant digits).
std::string format_double(double v);

}  // namespace klmedian
