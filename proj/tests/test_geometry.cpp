#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cbfnav/geometry.hpp"

using namespace cbfnav;

TEST_CASE("wrap_angle maps into (-pi, pi]") {
    CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
    CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(2.0 * kPi) == doctest::Approx(0.0));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = u(rng);
        const double w = wrap_angle(a);
        CHECK(w > -kPi);
        CHECK(w <= kPi);
        CHECK(std::fabs(std::remainder(a - w, 2.0 * kPi)) < 1e-9);
    }
}

TEST_CASE("enclosing_disk examples") {
    CHECK(enclosing_disk({{0, 0}, 1, 1}).radius == doctest::Approx(std::sqrt(2.0) / 2.0));
    CHECK(enclosing_disk({{0, 0}, 3, 4}).radius == doctest::Approx(2.5));
    CHECK(enclosing_disk({{0, 0}, 2, 0}).radius == doctest::Approx(1.0));
    const Disk d = enclosing_disk({{1.5, -2.0}, 1, 1});
    CHECK(d.center.x == doctest::Approx(1.5));
    CHECK(d.center.y == doctest::Approx(-2.0));
    CHECK_THROWS_AS((void)enclosing_disk({{0, 0}, 0, 0}), InvalidObstacle);
}

TEST_CASE("enclosing_disk covers every corner exactly") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.01, 5.0);
    std::uniform_real_distribution<double> c(-10.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        const ObstacleRect rect{{c(rng), c(rng)}, u(rng), u(rng)};
        const Disk d = enclosing_disk(rect);
        CHECK(d.radius >= std::max(rect.length, rect.width) / 2.0);
        for (double sx : {-0.5, 0.5}) {
            for (double sy : {-0.5, 0.5}) {
                const Vec2 corner{rect.center.x + sx * rect.length,
                                  rect.center.y + sy * rect.width};
                CHECK(std::fabs(norm(corner - d.center) - d.radius) < 1e-12);
            }
        }
    }
    // Equality with half the longer side only when the other side is zero.
    CHECK(enclosing_disk({{0, 0}, 4, 0}).radius == doctest::Approx(2.0));
    CHECK(enclosing_disk({{0, 0}, 4, 0.1}).radius > 2.0);
}

TEST_CASE("pose_error examples and antisymmetry") {
    const Pose2D a = Pose2D::make(1.0, 2.0, 0.5);
    const ErrorVec zero = pose_error(a, a);
    CHECK(zero.ex == 0.0);
    CHECK(zero.ey == 0.0);
    CHECK(zero.etheta == 0.0);

    const ErrorVec e = pose_error(Pose2D::make(-4, -4, 0), Pose2D::make(0, 1.5, 0));
    CHECK(e.ex == doctest::Approx(-4.0));
    CHECK(e.ey == doctest::Approx(-5.5));
    CHECK(e.etheta == doctest::Approx(0.0));

    const ErrorVec w = pose_error(Pose2D::make(0, 0, 3.0), Pose2D::make(0, 0, -3.0));
    CHECK(w.etheta == doctest::Approx(6.0 - 2.0 * kPi));  // -0.28319

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 200; ++i) {
        const Pose2D p = Pose2D::make(u(rng), u(rng), u(rng));
        const Pose2D q = Pose2D::make(u(rng), u(rng), u(rng));
        CHECK(pose_error(p, q).ex == doctest::Approx(-pose_error(q, p).ex));
        CHECK(pose_error(p, q).ey == doctest::Approx(-pose_error(q, p).ey));
    }
}

TEST_CASE("rect distance helpers") {
    const ObstacleRect rect{{0, 0}, 2, 1};
    CHECK(rect_signed_distance({3, 0}, rect) == doctest::Approx(2.0));
    CHECK(rect_signed_distance({0, 3}, rect) == doctest::Approx(2.5));
    CHECK(rect_signed_distance({2, 1.5}, rect) == doctest::Approx(std::hypot(1.0, 1.0)));
    CHECK(rect_signed_distance({0, 0}, rect) < 0.0);
    const Vec2 cp = rect_closest_point({3, 0.2}, rect);
    CHECK(cp.x == doctest::Approx(1.0));
    CHECK(cp.y == doctest::Approx(0.2));

    CHECK(segment_rect_distance({-3, 2}, {3, 2}, rect) == doctest::Approx(1.5));
    CHECK(segment_rect_distance({-3, 0}, {3, 0}, rect) == doctest::Approx(0.0));
    CHECK(segment_segment_distance({0, 0}, {1, 0}, {0, 1}, {1, 1}) == doctest::Approx(1.0));
    CHECK(segment_segment_distance({0, -1}, {0, 1}, {-1, 0}, {1, 0}) == doctest::Approx(0.0));
}

TEST_CASE("Pose2D::make rejects non-finite input and wraps") {
    CHECK_THROWS(Pose2D::make(std::nan(""), 0, 0));
    CHECK(Pose2D::make(0, 0, 4.0 * kPi).theta == doctest::Approx(0.0));
}
