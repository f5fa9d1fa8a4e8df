#include <doctest.h>

#include "helpers.hpp"
#include "klmedian/frechet.hpp"

using namespace klmedian;
using test::make_curve;

TEST_SUITE("frechet") {
    TEST_CASE("decision on small cases") {
        const Curve a = make_curve({{0, 0}, {1, 0}});
        CHECK(frechet_decide(a, a, 0.0));
        const Curve b = make_curve({{0, 1}, {1, 1}});
        CHECK_FALSE(frechet_decide(a, b, 0.999));
        CHECK(frechet_decide(a, b, 1.0));
    }

    TEST_CASE("backtracking curve in one dimension") {
        // The leash can wait at 0.25 while tau runs out to 0.5 and back to 0.
        const Curve sigma = make_curve({{0}, {1}});
        const Curve tau = make_curve({{0}, {0.5}, {0}, {1}});
        CHECK_FALSE(frechet_decide(sigma, tau, 0.24));
        CHECK(frechet_decide(sigma, tau, 0.25));
        CHECK(frechet_distance(sigma, tau) == doctest::Approx(0.25).epsilon(1e-9));
    }

    TEST_CASE("distance closed forms") {
        const Curve a = make_curve({{0, 0}, {1, 2}, {3, 1}});
        CHECK(frechet_distance(a, a) == 0.0);
        CHECK(frechet_distance(make_curve({{0, 0}}), make_curve({{3, 4}})) == 5.0);
        CHECK(frechet_distance(make_curve({{0, 0}, {1, 0}}), make_curve({{0, 1}, {1, 1}})) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }

    TEST_CASE("discrete distance") {
        const Curve a = make_curve({{0, 0}, {1, 2}, {3, 1}});
        CHECK(discrete_frechet(a, a) == 0.0);
        CHECK(discrete_frechet(make_curve({{0, 0}}), make_curve({{3, 4}})) == 5.0);
        // Discrete is strictly above continuous here: the vertex (0,1) must pair with a vertex.
        const Curve s = make_curve({{0, 0}, {2, 0}});
        const Curve t = make_curve({{0, 0}, {1, 1}, {2, 0}});
        CHECK(discrete_frechet(s, t) == doctest::Approx(std::sqrt(2.0)));
        CHECK(frechet_distance(s, t) == doctest::Approx(1.0).epsilon(1e-9));
    }

    TEST_CASE("dimension mismatch is invalid input") {
        CHECK_THROWS_AS(frechet_distance(make_curve({{0}}), make_curve({{0, 0}})), InvalidInput);
    }

    TEST_CASE("pseudo-metric properties on random triples") {
        Rng rng(101);
        for (int t = 0; t < 300; ++t) {
            const auto d = Eigen::Index(1 + rng.below(3));
            const Curve a = test::random_curve(rng, d, Eigen::Index(1 + rng.below(10)));
            const Curve b = test::random_curve(rng, d, Eigen::Index(1 + rng.below(10)));
            const Curve c = test::random_curve(rng, d, Eigen::Index(1 + rng.below(10)));
            const double ab = frechet_distance(a, b), bc = frechet_distance(b, c), ac = frechet_distance(a, c);
            CHECK(ab == frechet_distance(b, a));
            CHECK(frechet_distance(a, a) == 0.0);
            const double tol = 3e-9 * std::max({ab, bc, ac, 1.0});
            CHECK(ac <= ab + bc + tol);
            CHECK(frechet_lower_bound(a, b) <= ab);
            CHECK(ab <= discrete_frechet(a, b));
        }
    }

    TEST_CASE("bracket validity and monotone decision") {
        Rng rng(7);
        for (int t = 0; t < 1000; ++t) {
            const auto d = Eigen::Index(1 + rng.below(3));
            const Curve a = test::random_curve(rng, d, Eigen::Index(1 + rng.below(8)));
            const Curve b = test::random_curve(rng, d, Eigen::Index(1 + rng.below(8)));
            const double L = frechet_lower_bound(a, b), U = discrete_frechet(a, b);
            CHECK(frechet_decide(a, b, U));
            if (L > 0) CHECK_FALSE(frechet_decide(a, b, (1 - 10 * 1e-9) * L));
            const double e1 = rng.uniform(0, 8), e2 = e1 + rng.uniform(0, 1);
            if (frechet_decide(a, b, e1)) CHECK(frechet_decide(a, b, e2));
        }
    }

    TEST_CASE("inserting a collinear vertex does not move the distance") {
        Rng rng(9);
        for (int t = 0; t < 200; ++t) {
            const Curve a = test::random_curve(rng, 2, 5);
            const Curve b = test::random_curve(rng, 2, 5);
            VertexMatrix<double> v(2, a.size() + 1);
            v.leftCols(1) = a.vertices().leftCols(1);
            v.col(1) = 0.3 * a.vertex(0) + 0.7 * a.vertex(1);
            v.rightCols(a.size() - 1) = a.vertices().rightCols(a.size() - 1);
            const double before = frechet_distance(a, b), after = frechet_distance(Curve(v), b);
            CHECK(std::abs(before - after) <= 2e-9 * std::max(1.0, before));
        }
    }

    TEST_CASE("full diagram agrees with the streaming decision") {
        Rng rng(13);
        for (int t = 0; t < 300; ++t) {
            const auto d = Eigen::Index(1 + rng.below(2));
            const Curve a = test::random_curve(rng, d, Eigen::Index(2 + rng.below(6)));
            const Curve b = test::random_curve(rng, d, Eigen::Index(2 + rng.below(6)));
            const double eps = rng.uniform(0, 6);
            const FreeSpaceDiagram fsd = build_free_space(a, b, eps);
            CHECK(fsd.corner_reachable() == frechet_decide(a, b, eps));
        }
    }
}
