#include <doctest.h>

#include "helpers.hpp"
#include "klmedian/oracles.hpp"
#include "klmedian/simplify.hpp"

using namespace klmedian;
using test::make_curve;

TEST_SUITE("simplify") {
    TEST_CASE("short curves are returned unchanged") {
        const Curve c = make_curve({{0, 0}, {1, 2}, {3, 1}});
        const auto r = simplify(c, 3);
        CHECK(r.curve == c);
        CHECK(r.error == 0.0);
        CHECK(r.indices == std::vector<Eigen::Index>{0, 1, 2});
    }

    TEST_CASE("spike reduces to its chord") {
        // tau = (0,0) (1,1) (2,0); the chord is at distance 1 from the apex.
        const Curve tau = make_curve({{0, 0}, {1, 1}, {2, 0}});
        const auto r = simplify(tau, 2);
        CHECK(r.curve.size() == 2);
        CHECK(r.indices == std::vector<Eigen::Index>{0, 2});
        CHECK(r.error == doctest::Approx(1.0).epsilon(1e-8));
    }

    TEST_CASE("ell = 1 gives a single point") {
        const Curve tau = make_curve({{0}, {4}});
        const auto r = simplify(tau, 1);
        CHECK(r.curve.size() == 1);
        CHECK(r.curve.vertex(0)[0] == doctest::Approx(2.0));
        CHECK(r.error == doctest::Approx(2.0).epsilon(1e-8));
    }

    TEST_CASE("zero ell is invalid") {
        CHECK_THROWS_AS(simplify(make_curve({{0}, {1}}), 0), InvalidInput);
    }

    TEST_CASE("zigzag stays within four times the best vertex subsequence") {
        const Curve z = make_curve({{0, 0}, {1, 1}, {2, -1}, {3, 1}, {4, -1}, {5, 0}});
        for (std::size_t ell = 2; ell <= 6; ++ell) {
            const auto r = simplify(z, ell);
            const double best = exhaustive_simplification_error(z, ell);
            CHECK(r.error <= 4.0 * best + 1e-9);
            CHECK(r.curve.size() <= Eigen::Index(ell));
        }
    }

    TEST_CASE("random curves: complexity, reported error, factor four, monotone in ell") {
        Rng rng(21);
        for (int t = 0; t < 150; ++t) {
            const auto d = Eigen::Index(1 + rng.below(3));
            const Curve tau = test::random_curve(rng, d, Eigen::Index(2 + rng.below(9)));
            double prev = std::numeric_limits<double>::infinity();
            for (std::size_t ell = 2; ell <= 5; ++ell) {
                const auto r = simplify(tau, ell);
                CHECK(r.curve.size() <= Eigen::Index(ell));
                const double actual = frechet_distance(tau, r.curve);
                CHECK(r.error == doctest::Approx(actual).epsilon(1e-8));
                CHECK(r.error <= 4.0 * exhaustive_simplification_error(tau, ell) + 1e-9);
                CHECK(r.error <= prev + 1e-12);
                prev = r.error;
                REQUIRE(!r.indices.empty());
                CHECK(r.indices.front() == 0);
                CHECK(r.indices.back() == tau.size() - 1);
                CHECK(std::is_sorted(r.indices.begin(), r.indices.end()));
            }
        }
    }

    TEST_CASE("simplify_all keeps order") {
        Rng rng(3);
        std::vector<Curve> cs;
        for (int i = 0; i < 6; ++i) cs.push_back(test::random_curve(rng, 2, 7));
        const CurveDataset T(cs);
        const auto all = simplify_all(T, 3);
        REQUIRE(all.size() == T.size());
        for (std::size_t i = 0; i < T.size(); ++i) CHECK(all[i].curve == simplify(T[i], 3).curve);
    }
}
