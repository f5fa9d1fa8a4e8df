#include <doctest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "klmedian/geometry.hpp"

using namespace klmedian;
using test::point;

namespace {

std::vector<double> coords_1d(const std::vector<Point<double>>& pts) {
    std::vector<double> out;
    for (const auto& p : pts) out.push_back(p[0]);
    return out;
}

}  // namespace

TEST_SUITE("geometry") {
    TEST_CASE("grid_point floors every coordinate") {
        CHECK(grid_point(point({2.7, -1.3}), 0.5) == point({2.5, -1.5}));
        CHECK(grid_point(point({0, 0, 0}), 1.0) == point({0, 0, 0}));
        CHECK(grid_point(point({-0.1}), 1.0) == point({-1.0}));
    }

    TEST_CASE("grid_point rejects bad input") {
        CHECK_THROWS_AS(grid_point(point({NAN}), 1.0), InvalidInput);
        CHECK_THROWS_AS(grid_point(point({1.0}), 0.0), InvalidInput);
    }

    TEST_CASE("grid_point bound and idempotence on random points") {
        Rng rng(3);
        for (int t = 0; t < 10000; ++t) {
            const auto d = Eigen::Index(1 + rng.below(4));
            Point<double> p(d);
            for (Eigen::Index i = 0; i < d; ++i) p[i] = rng.uniform(-100, 100);
            const double r = std::exp(rng.uniform(-5, 3));
            const Point<double> g = grid_point(p, r);
            CHECK((p - g).norm() <= std::sqrt(double(d)) * r);
            CHECK(grid_point(g, r) == g);
        }
    }

    TEST_CASE("grid_cover_ball small cases") {
        CHECK(coords_1d(grid_cover_ball(Ball<double>{point({0}), 1.0}, 1.0)) == std::vector<double>{-1, 0, 1});
        const auto single = grid_cover_ball(Ball<double>{point({0, 0}), 0.0}, 0.5);
        REQUIRE(single.size() == 1);
        CHECK(single[0] == point({0, 0}));
        CHECK(coords_1d(grid_cover_ball(Ball<double>{point({0.25}), 0.5}, 0.25)) ==
              std::vector<double>{-0.25, 0, 0.25, 0.5, 0.75});
    }

    TEST_CASE("grid_cover_ball capacity error names the size") {
        try {
            grid_cover_ball(Ball<double>{point({0, 0}), 100.0}, 0.01, 1e6);
            FAIL("expected a capacity error");
        } catch (const CapacityError& e) {
            CHECK(e.required() > 1e6);
        }
    }

    TEST_CASE("grid_cover_ball matches dense sampling and the size bound") {
        Rng rng(5);
        for (int t = 0; t < 200; ++t) {
            const auto d = Eigen::Index(1 + rng.below(2));
            Point<double> c(d);
            for (Eigen::Index i = 0; i < d; ++i) c[i] = rng.uniform(-3, 3);
            const double R = rng.uniform(0, 2), r = rng.uniform(0.2, 1.0);
            const auto cover = grid_cover_ball(Ball<double>{c, R}, r);
            CHECK(double(cover.size()) <= grid_cover_bound(R, r, d));
            std::set<std::vector<double>> got;
            for (const auto& g : cover) got.insert(std::vector<double>(g.data(), g.data() + d));
            // Every sampled point of the ball lands in a returned cell.
            for (int s = 0; s < 400; ++s) {
                Point<double> q(d);
                do {
                    for (Eigen::Index i = 0; i < d; ++i) q[i] = rng.uniform(-R, R);
                } while (q.norm() > R);
                q += c;
                const Point<double> g = grid_point(q, r);
                CHECK(got.count(std::vector<double>(g.data(), g.data() + d)) == 1);
            }
            // Every returned cell meets the ball.
            for (const auto& g : cover) {
                double gap2 = 0.0;
                for (Eigen::Index i = 0; i < d; ++i) {
                    const double x = std::clamp(c[i], g[i], g[i] + r);
                    gap2 += (x - c[i]) * (x - c[i]);
                }
                CHECK(gap2 <= R * R + 1e-12);
            }
        }
    }
}
