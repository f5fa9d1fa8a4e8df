#include <doctest.h>

#include <json.hpp>

#include "process.hpp"

using namespace klmedian::test;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kCli = KLMEDIAN_CLI;
const std::string kFixtures = KLMEDIAN_FIXTURE_DIR;

void write(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("distance prints 17 significant digits") {
        TempDir tmp;
        write(tmp / "a.csv", "id,x1,x2\na,0,0\na,1,0\n");
        write(tmp / "b.csv", "id,x1,x2\nb,0,1\nb,1,1\n");
        const auto r = run(kCli, "distance --input " + (tmp / "a.csv").string() + " --input " + (tmp / "b.csv").string(), tmp);
        CHECK(r.code == 0);
        CHECK(std::stod(r.out) == doctest::Approx(1.0).epsilon(1e-9));
    }

    TEST_CASE("invalid input exits 2") {
        TempDir tmp;
        write(tmp / "bad.csv", "id,x1,x2\na,0,0\na,1\n");
        CHECK(run(kCli, "cluster --input " + (tmp / "bad.csv").string() + " --seed 1", tmp).code == 2);
        CHECK(run(kCli, "cluster --input " + (tmp / "missing.csv").string() + " --seed 1", tmp).code == 2);
        CHECK(run(kCli, "cluster --bogus", tmp).code == 2);
        CHECK(run(kCli, "median1 --input " + kFixtures + "/median1_line.csv --epsilon 0.9 --seed 1", tmp).code == 2);
    }

    TEST_CASE("capacity exits 3") {
        TempDir tmp;
        const auto r = run(kCli, "median1 --input " + kFixtures + "/median1_line.csv --seed 1 --candidate-cap 100", tmp);
        CHECK(r.code == 3);
        CHECK(r.err.find("capacity") != std::string::npos);
    }

    TEST_CASE("coreset writes the sidecar") {
        TempDir tmp;
        const auto out = tmp / "cs.jsonl";
        const auto r = run(kCli, "coreset --input " + kFixtures + "/coreset_clusters.csv --k 3 --ell 3 --epsilon 0.5 --coreset-size 30 --seed 4 --output " + out.string(), tmp);
        REQUIRE(r.code == 0);
        const json meta = json::parse(read_file(out.string() + ".meta.json"));
        for (const char* key : {"seed", "n", "k", "ell", "epsilon", "sample_size", "Gamma", "Lambda", "alpha_hat"}) {
            CHECK_MESSAGE(meta.contains(key), key);
        }
        CHECK(meta["seed"] == 4);
        CHECK(meta["sample_size"] == 30);
        CHECK(meta["n"] == 60);
        std::istringstream lines(read_file(out));
        std::string line;
        int count = 0;
        while (std::getline(lines, line)) {
            if (line.empty()) continue;
            CHECK(json::parse(line)["weight"].get<double>() > 0.0);
            ++count;
        }
        CHECK(count == 30);
    }

    TEST_CASE("omitted seed is printed") {
        TempDir tmp;
        const auto r = run(kCli, "generate --n 3 --k 1 --m 3", tmp);
        CHECK(r.code == 0);
        CHECK(r.err.find("seed: ") != std::string::npos);
    }

    TEST_CASE("median1 emits its trace") {
        TempDir tmp;
        const auto r = run(kCli, "median1 --input " + kFixtures + "/median1_line.csv --seed 3", tmp);
        REQUIRE(r.code == 0);
        const json j = json::parse(r.out);
        CHECK(j["trace"].contains("epsilon_prime"));
        CHECK(j["winner"].size() <= 2);
    }

    TEST_CASE("verify passes on the bundled fixtures") {
        TempDir tmp;
        const auto r = run(kCli, "verify --suite frechet --seed 1", tmp);
        CHECK(r.code == 0);
        CHECK(json::parse(r.out)["pass"] == true);
    }

    TEST_CASE("corrupted fixture gives a named failure") {
        TempDir tmp;
        const auto dir = tmp / "fixtures";
        fs::copy(kFixtures, dir);
        std::string text = read_file(dir / "frechet_cases.jsonl");
        const auto pos = text.find("\"distance\": 1}");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 14, "\"distance\": 7}");
        write(dir / "frechet_cases.jsonl", text);
        const auto r = run(kCli, "verify --suite frechet --seed 1 --fixtures " + dir.string(), tmp);
        CHECK(r.code == 4);
        CHECK(r.err.find("parallel_unit") != std::string::npos);

        write(dir / "median1_line.csv", "id,x1\nc,1\nc,oops\n");
        const auto r2 = run(kCli, "verify --suite median1 --seed 1 --fixtures " + dir.string(), tmp);
        CHECK(r2.code == 4);
        CHECK(r2.err.find("median1_line.csv") != std::string::npos);
    }
}
