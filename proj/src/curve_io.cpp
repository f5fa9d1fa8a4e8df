#include "klmedian/curve_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include <json.hpp>

#include "klmedian/json_io.hpp"

namespace klmedian {
namespace {

using json = nlohmann::json;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_number(std::string_view field, std::size_t line_no) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw ParseError("non-numeric coordinate '" + std::string(field) + "'", line_no);
    }
    return v;
}

/// Collects vertices per id, preserving first-appearance order of ids.
struct CurveCollector {
    std::vector<std::string> order;
    std::unordered_map<std::string, std::vector<Point<double>>> vertices;
    std::unordered_map<std::string, std::size_t> first_line;

    void add(const std::string& id, Point<double> p, std::size_t line_no) {
        auto [it, inserted] = vertices.try_emplace(id);
        if (inserted) {
            order.push_back(id);
            first_line[id] = line_no;
        }
        it->second.push_back(std::move(p));
    }

    CurveDataset finish(double tol) {
        if (order.empty()) throw ParseError("dataset contains no curves", 0);
        std::vector<Curve> curves;
        curves.reserve(order.size());
        for (const auto& id : order) {
            const auto& pts = vertices[id];
            if (pts.empty()) throw ParseError("curve '" + id + "' is empty", first_line[id]);
            curves.push_back(normalize(Curve::from_points(pts, id), tol));
        }
        return CurveDataset(std::move(curves));
    }
};

CurveDataset load_csv(std::istream& in, double tol) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto header = split_commas(line);
        if (header.size() < 2 || header.front() != "id") {
            throw ParseError("header must be 'id,x1,...,xd'", line_no);
        }
        dim = header.size() - 1;
        break;
    }
    if (dim == 0) throw ParseError("missing header", line_no);

    CurveCollector collector;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_commas(line);
        if (fields.size() != dim + 1) {
            throw ParseError("expected " + std::to_string(dim) + " coordinates, found " +
                                 std::to_string(fields.size() - 1),
                             line_no);
        }
        if (fields.front().empty()) throw ParseError("empty curve id", line_no);
        Point<double> p(static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < dim; ++i) p[Eigen::Index(i)] = parse_number(fields[i + 1], line_no);
        collector.add(std::string(fields.front()), std::move(p), line_no);
    }
    return collector.finish(tol);
}

struct JsonRecord {
    std::string id;
    std::vector<Point<double>> vertices;
    std::optional<double> weight;
};

JsonRecord parse_record(const std::string& line, std::size_t line_no, std::size_t& dim) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!obj.is_object()) throw ParseError("record must be a JSON object", line_no);
    JsonRecord rec;
    if (!obj.contains("id") || !obj["id"].is_string()) throw ParseError("record needs a string 'id'", line_no);
    rec.id = obj["id"].get<std::string>();
    if (!obj.contains("vertices") || !obj["vertices"].is_array()) {
        throw ParseError("record needs a 'vertices' array", line_no);
    }
    const auto& verts = obj["vertices"];
    if (verts.empty()) throw ParseError("curve '" + rec.id + "' is empty", line_no);
    for (const auto& v : verts) {
        if (!v.is_array() || v.empty()) throw ParseError("vertex must be a non-empty array", line_no);
        if (dim == 0) dim = v.size();
        if (v.size() != dim) {
            throw ParseError("expected " + std::to_string(dim) + " coordinates, found " + std::to_string(v.size()),
                             line_no);
        }
        Point<double> p(static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < dim; ++i) {
            if (!v[i].is_number()) throw ParseError("non-numeric coordinate", line_no);
            p[Eigen::Index(i)] = v[i].get<double>();
            if (!std::isfinite(p[Eigen::Index(i)])) throw ParseError("non-finite coordinate", line_no);
        }
        rec.vertices.push_back(std::move(p));
    }
    if (obj.contains("weight")) {
        if (!obj["weight"].is_number()) throw ParseError("weight must be a number", line_no);
        rec.weight = obj["weight"].get<double>();
    }
    return rec;
}

CurveDataset load_jsonl(std::istream& in, double tol) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    CurveCollector collector;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        JsonRecord rec = parse_record(line, line_no, dim);
        for (auto& p : rec.vertices) collector.add(rec.id, std::move(p), line_no);
    }
    return collector.finish(tol);
}

json vertices_json(const Curve& c) {
    json verts = json::array();
    for (Eigen::Index j = 0; j < c.size(); ++j) {
        json v = json::array();
        for (Eigen::Index i = 0; i < c.dim(); ++i) v.push_back(c.vertices()(i, j));
        verts.push_back(std::move(v));
    }
    return verts;
}

std::string curve_label(const Curve& c, std::size_t index) {
    return c.id().empty() ? std::to_string(index) : c.id();
}

}  // namespace

DatasetFormat parse_format(const std::string& name) {
    if (name == "csv") return DatasetFormat::csv;
    if (name == "jsonl") return DatasetFormat::jsonl;
    throw InvalidInput("unknown format '" + name + "' (expected csv or jsonl)");
}

std::vector<double> WeightedCurveSet::pooled_weights() const {
    std::vector<double> w(curves.size(), 0.0);
    for (const auto& e : entries) w[e.curve] += e.weight;
    return w;
}

WeightedCurveSet WeightedCurveSet::unit(const CurveDataset& T) {
    WeightedCurveSet ws;
    ws.curves = T.curves;
    ws.entries.reserve(T.size());
    ws.source_index.reserve(T.size());
    for (std::size_t i = 0; i < T.size(); ++i) {
        ws.entries.push_back({i, 1.0});
        ws.source_index.push_back(i);
    }
    ws.meta.n = T.size();
    ws.meta.sample_size = T.size();
    return ws;
}

CurveDataset load_dataset(std::istream& in, DatasetFormat format, double collinearity_tol) {
    return format == DatasetFormat::csv ? load_csv(in, collinearity_tol) : load_jsonl(in, collinearity_tol);
}

CurveDataset load_dataset_file(const std::string& path, DatasetFormat format, double collinearity_tol) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    return load_dataset(in, format, collinearity_tol);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void save_dataset(const CurveDataset& T, std::ostream& out, DatasetFormat format) {
    if (format == DatasetFormat::csv) {
        out << "id";
        for (Eigen::Index i = 0; i < T.dim; ++i) out << ",x" << (i + 1);
        out << '\n';
        for (std::size_t c = 0; c < T.size(); ++c) {
            const Curve& curve = T[c];
            const std::string id = curve_label(curve, c);
            for (Eigen::Index j = 0; j < curve.size(); ++j) {
                out << id;
                for (Eigen::Index i = 0; i < curve.dim(); ++i) out << ',' << format_double(curve.vertices()(i, j));
                out << '\n';
            }
        }
        return;
    }
    for (std::size_t c = 0; c < T.size(); ++c) {
        json rec;
        rec["id"] = curve_label(T[c], c);
        rec["vertices"] = vertices_json(T[c]);
        out << dump_json(rec) << '\n';
    }
}

void save_weighted_set(const WeightedCurveSet& ws, std::ostream& out) {
    for (const auto& e : ws.entries) {
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            throw InvalidInput("weighted set entries need strictly positive finite weights");
        }
        if (e.curve >= ws.curves.size()) throw InvalidInput("weighted set entry references a missing curve");
    }
    for (const auto& e : ws.entries) {
        const Curve& c = ws.curve_of(e);
        json rec;
        rec["id"] = curve_label(c, e.curve);
        rec["vertices"] = vertices_json(c);
        rec["weight"] = e.weight;
        out << dump_json(rec) << '\n';
    }
}

WeightedCurveSet load_weighted_set(std::istream& in) {
    WeightedCurveSet ws;
    std::multimap<std::string, std::size_t> by_id;
    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        JsonRecord rec = parse_record(line, line_no, dim);
        if (!rec.weight) throw ParseError("weighted record needs a 'weight'", line_no);
        if (!(*rec.weight > 0.0)) throw ParseError("weight must be strictly positive", line_no);
        Curve c = Curve::from_points(rec.vertices, rec.id);
        std::size_t slot = ws.curves.size();
        auto [lo, hi] = by_id.equal_range(rec.id);
        for (auto it = lo; it != hi; ++it) {
            if (ws.curves[it->second] == c) {
                slot = it->second;
                break;
            }
        }
        if (slot == ws.curves.size()) {
            ws.curves.push_back(std::move(c));
            by_id.emplace(rec.id, slot);
        }
        ws.entries.push_back({slot, *rec.weight});
    }
    if (ws.entries.empty()) throw ParseError("weighted set contains no records", 0);
    ws.meta.sample_size = ws.entries.size();
    return ws;
}

}  // namespace klmedian
