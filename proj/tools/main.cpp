// klmedian command-line front end.

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "klmedian/clustering.hpp"
#include "klmedian/coreset.hpp"
#include "klmedian/curve_io.hpp"
#include "klmedian/json_io.hpp"
#include "klmedian/median1.hpp"
#include "klmedian/parallel.hpp"
#include "klmedian/synthetic.hpp"
#include "verify.hpp"

#ifndef KLMEDIAN_FIXTURE_DIR
#define KLMEDIAN_FIXTURE_DIR "fixtures"
#endif

namespace {

using namespace klmedian;
using json = nlohmann::json;

enum ExitCode { kOk = 0, kInternal = 1, kInvalid = 2, kCapacity = 3, kVerifyFailed = 4 };

struct Options {
    std::vector<std::string> inputs;
    std::string format = "csv";
    std::string output;
    std::uint64_t seed = 0;
    double epsilon = 0.1;
    double delta = 0.1;
    std::size_t k = 1;
    std::size_t ell = 2;
    std::size_t coreset_size = 0;
    std::string mode = "exhaustive";
    std::size_t threads = 0;
    double candidate_cap = 1e10;
    std::string suite = "all";
    std::string fixtures = KLMEDIAN_FIXTURE_DIR;
    // generate
    std::size_t n = 30;
    std::size_t dim = 2;
    std::size_t m = 10;
    double spread = 0.5;
    double separation = 50.0;
    double extent = 10.0;
};

void configure_logging() {
    auto logger = spdlog::stderr_logger_st("klmedian");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("CORESET_LOG")) {
        const auto level = spdlog::level::from_str(env);
        if (level == spdlog::level::off && std::string(env) != "off") {
            spdlog::warn("CORESET_LOG: unknown level '{}', keeping 'warn'", env);
        } else {
            spdlog::set_level(level);
        }
    }
}

/// Seed from --seed, or from entropy; the chosen seed is always reported.
std::uint64_t resolve_seed(const CLI::App& cmd, std::uint64_t given) {
    if (cmd.count("--seed")) return given;
    std::random_device rd;
    const std::uint64_t seed = (std::uint64_t(rd()) << 32) ^ rd();
    std::fprintf(stderr, "seed: %llu\n", static_cast<unsigned long long>(seed));
    return seed;
}

const std::string& single_input(const Options& o) {
    if (o.inputs.size() != 1) throw InvalidInput("expected exactly one --input");
    return o.inputs.front();
}

CurveDataset read_input(const Options& o) { return load_dataset_file(single_input(o), parse_format(o.format)); }

/// Writes to --output, or stdout when it is empty.
void emit(const Options& o, const std::string& text) {
    if (o.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(o.output, std::ios::binary);
    if (!out) throw InvalidInput("cannot write '" + o.output + "'");
    out << text;
}

json curve_json(const Curve& c) {
    json verts = json::array();
    for (Eigen::Index j = 0; j < c.size(); ++j) {
        json v = json::array();
        for (Eigen::Index i = 0; i < c.dim(); ++i) v.push_back(c.vertices()(i, j));
        verts.push_back(std::move(v));
    }
    return verts;
}

int cmd_distance(const Options& o) {
    if (o.inputs.size() != 2) throw InvalidInput("distance needs two --input files");
    const auto fmt = parse_format(o.format);
    const CurveDataset a = load_dataset_file(o.inputs[0], fmt);
    const CurveDataset b = load_dataset_file(o.inputs[1], fmt);
    if (a.size() != 1 || b.size() != 1) throw InvalidInput("each distance input must hold exactly one curve");
    if (a.dim != b.dim) throw InvalidInput("curves have different dimensions");
    emit(o, format_double(frechet_distance(a[0], b[0])) + "\n");
    return kOk;
}

int cmd_coreset(const Options& o, std::uint64_t seed) {
    if (o.output.empty()) throw InvalidInput("coreset needs --output (the metadata goes to <output>.meta.json)");
    const CurveDataset T = read_input(o);
    CoresetConfig cfg;
    cfg.k = o.k;
    cfg.ell = o.ell;
    cfg.epsilon = o.epsilon;
    cfg.delta = o.delta;
    if (o.coreset_size) cfg.sample_size = o.coreset_size;
    cfg.seed = seed;
    cfg.mode = parse_discrete_mode(o.mode);
    const CoresetBuild b = build_coreset(T, cfg);

    std::ostringstream body;
    save_weighted_set(b.coreset, body);
    emit(o, body.str());
    const auto& m = b.coreset.meta;
    json meta = {{"seed", m.seed},           {"n", m.n},
                 {"k", m.k},                 {"ell", m.ell},
                 {"epsilon", m.epsilon},     {"delta", m.delta},
                 {"sample_size", m.sample_size}, {"Gamma", m.gamma_total},
                 {"Lambda", m.lambda_total}, {"alpha_hat", m.alpha_hat}};
    std::ofstream side(o.output + ".meta.json", std::ios::binary);
    if (!side) throw InvalidInput("cannot write '" + o.output + ".meta.json'");
    side << dump_json(meta, 2) << '\n';
    return kOk;
}

int cmd_cluster(const Options& o, std::uint64_t seed) {
    const CurveDataset T = read_input(o);
    ConstantFactorConfig cfg;
    cfg.k = o.k;
    cfg.ell = o.ell;
    cfg.delta = o.delta;
    cfg.seed = seed;
    cfg.mode = parse_discrete_mode(o.mode);
    const ClusteringResult r = kl_median_constant_factor(T, cfg);
    json centers = json::array();
    for (const auto& c : r.centers.centers) centers.push_back(curve_json(c));
    json out = {{"seed", seed},
                {"k", o.k},
                {"ell", o.ell},
                {"mode", o.mode},
                {"alpha_hat", r.approx_factor},
                {"total_cost", r.total_cost},
                {"cluster_costs", r.cluster_costs},
                {"assignment", r.assignment},
                {"center_indices", r.center_indices},
                {"centers", centers}};
    emit(o, dump_json(out, 2) + "\n");
    return kOk;
}

int cmd_median1(const Options& o, std::uint64_t seed) {
    const CurveDataset T = read_input(o);
    Median1Config cfg;
    cfg.epsilon = o.epsilon;
    cfg.delta = o.delta;
    cfg.ell = o.ell;
    cfg.seed = seed;
    cfg.candidate_cap = o.candidate_cap;
    if (o.coreset_size) cfg.coreset_size = o.coreset_size;
    Median1Trace tr;
    const Curve c = one_median_5eps(T, cfg, &tr);
    json out = {{"seed", seed},
                {"winner", curve_json(c)},
                {"full_cost", cost(T, CenterSet({c}))},
                {"coreset_cost", tr.winner_coreset_cost},
                {"trace", tr.to_json()}};
    emit(o, dump_json(out, 2) + "\n");
    return kOk;
}

int cmd_verify(const Options& o, std::uint64_t seed) {
    std::vector<std::string> suites;
    if (o.suite == "all") {
        suites.assign(std::begin(cli::kSuites), std::end(cli::kSuites));
    } else {
        suites.push_back(o.suite);
    }
    json reports = json::array();
    bool pass = true;
    for (const auto& s : suites) {
        json r = cli::run_suite(s, o.fixtures, seed);
        pass = pass && r["pass"].get<bool>();
        for (const auto& c : r["checks"]) {
            if (!c["pass"].get<bool>()) spdlog::error("{}: check '{}' failed", s, c["name"].get<std::string>());
        }
        reports.push_back(std::move(r));
    }
    json out = {{"seed", seed}, {"pass", pass}, {"suites", reports}};
    emit(o, dump_json(out, 2) + "\n");
    return pass ? kOk : kVerifyFailed;
}

int cmd_generate(const Options& o, std::uint64_t seed) {
    SyntheticConfig cfg;
    cfg.n = o.n;
    cfg.k = o.k;
    cfg.dim = o.dim;
    cfg.complexity = o.m;
    cfg.spread = o.spread;
    cfg.separation = o.separation;
    cfg.extent = o.extent;
    cfg.seed = seed;
    const SyntheticDataset g = generate_clusters(cfg);
    std::ostringstream body;
    save_dataset(g.data, body, parse_format(o.format));
    emit(o, body.str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();
    CLI::App app{"(k,l)-median clustering of polygonal curves under the Frechet distance"};
    app.require_subcommand(1);
    Options o;

    auto add_io = [&](CLI::App* c) {
        c->add_option("--input", o.inputs, "Input file")->required();
        c->add_option("--format", o.format, "Input format")->check(CLI::IsMember({"csv", "jsonl"}));
        c->add_option("--output", o.output, "Output file (default: stdout)");
    };
    auto add_common = [&](CLI::App* c) {
        c->add_option("--seed", o.seed, "Random seed (default: entropy, printed to stderr)");
        c->add_option("--threads", o.threads, "Worker threads (default: logical cores)");
    };

    auto* distance = app.add_subcommand("distance", "Frechet distance between two single-curve files");
    add_io(distance);
    distance->add_option("--threads", o.threads, "Worker threads");

    auto* coreset = app.add_subcommand("coreset", "Sensitivity-sampled weighted coreset");
    add_io(coreset);
    add_common(coreset);
    coreset->add_option("--k", o.k, "Number of centers");
    coreset->add_option("--ell", o.ell, "Center complexity");
    coreset->add_option("--epsilon", o.epsilon, "Target relative error");
    coreset->add_option("--delta", o.delta, "Failure probability");
    coreset->add_option("--coreset-size", o.coreset_size, "Sample size override");
    coreset->add_option("--mode", o.mode, "Discrete solver")->check(CLI::IsMember({"exhaustive", "local_search"}));

    auto* cluster = app.add_subcommand("cluster", "Constant-factor (k,l)-median");
    add_io(cluster);
    add_common(cluster);
    cluster->add_option("--k", o.k, "Number of centers");
    cluster->add_option("--ell", o.ell, "Center complexity");
    cluster->add_option("--delta", o.delta, "Failure probability");
    cluster->add_option("--mode", o.mode, "Discrete solver")->check(CLI::IsMember({"exhaustive", "local_search"}));

    auto* median1 = app.add_subcommand("median1", "Coreset-accelerated (1,l)-median");
    add_io(median1);
    add_common(median1);
    median1->add_option("--ell", o.ell, "Median complexity parameter");
    median1->add_option("--epsilon", o.epsilon, "Approximation slack in (0, 1/2]");
    median1->add_option("--delta", o.delta, "Failure probability");
    median1->add_option("--coreset-size", o.coreset_size, "Coreset sample size override");
    median1->add_option("--candidate-cap", o.candidate_cap, "Largest candidate tuple count");

    auto* verify = app.add_subcommand("verify", "Run oracle suites on the bundled fixtures");
    add_common(verify);
    verify->add_option("--suite", o.suite, "Suite to run")
        ->check(CLI::IsMember({"all", "frechet", "simplify", "sensitivity", "coreset", "median1"}));
    verify->add_option("--fixtures", o.fixtures, "Fixture directory");
    verify->add_option("--output", o.output, "Report file (default: stdout)");

    auto* generate = app.add_subcommand("generate", "Synthetic clustered curves");
    add_common(generate);
    generate->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "jsonl"}));
    generate->add_option("--output", o.output, "Output file (default: stdout)");
    generate->add_option("--n", o.n, "Number of curves");
    generate->add_option("--k", o.k, "Number of clusters");
    generate->add_option("--dim", o.dim, "Ambient dimension");
    generate->add_option("--m", o.m, "Vertices per curve");
    generate->add_option("--spread", o.spread, "Noise standard deviation");
    generate->add_option("--separation", o.separation, "Prototype offset along the first axis");
    generate->add_option("--extent", o.extent, "Prototype coordinate range");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (o.threads) set_thread_count(o.threads);
        CLI::App* cmd = app.get_subcommands().front();
        const std::string name = cmd->get_name();
        if (name == "distance") return cmd_distance(o);
        const std::uint64_t seed = resolve_seed(*cmd, o.seed);
        if (name == "coreset") return cmd_coreset(o, seed);
        if (name == "cluster") return cmd_cluster(o, seed);
        if (name == "median1") return cmd_median1(o, seed);
        if (name == "verify") return cmd_verify(o, seed);
        return cmd_generate(o, seed);
    } catch (const CapacityError& e) {
        std::fprintf(stderr, "capacity error: %s\n", e.what());
        return kCapacity;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return kInvalid;
    } catch (const InvalidInput& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kInvalid;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInternal;
    }
}
