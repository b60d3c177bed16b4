#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "elproc/hough_lines.hpp"
#include "test_support.hpp"

using namespace elproc;
using namespace elproc::test;

namespace {

BinaryImage blank(int w, int h) { return BinaryImage(w, h); }

void draw_vertical(BinaryImage& img, int x, int y0, int y1) {
    for (int y = y0; y <= y1; ++y) img.set(x, y, true);
}

}  // namespace

TEST_CASE("hough: empty input gives empty output") {
    CHECK(hough_line_segments(blank(64, 64), {}).empty());
}

TEST_CASE("hough: single ideal vertical segment is recovered") {
    BinaryImage img = blank(120, 240);
    draw_vertical(img, 60, 10, 209);  // 200 px
    HoughParams params;
    params.threshold = 50;
    params.max_gap = 5;
    params.min_length = 100;
    const auto segs = hough_line_segments(img, params);
    REQUIRE(segs.size() == 1);
    const auto& s = segs.front();
    const double angle_from_vertical =
        std::abs(std::atan2(std::abs(s.x2 - s.x1), std::abs(s.y2 - s.y1)));
    CHECK(angle_from_vertical <= 1.0 * kDeg);
    CHECK(std::abs(s.x1 - 60) <= 2);
    CHECK(std::abs(s.x2 - 60) <= 2);
    CHECK(std::abs(std::min(s.y1, s.y2) - 10) <= 2);
    CHECK(std::abs(std::max(s.y1, s.y2) - 209) <= 2);
}

TEST_CASE("hough: two parallel lines 100 px apart") {
    BinaryImage img = blank(220, 200);
    draw_vertical(img, 50, 5, 194);
    draw_vertical(img, 150, 5, 194);
    HoughParams params;
    params.threshold = 50;
    params.max_gap = 5;
    params.min_length = 80;
    auto segs = hough_line_segments(img, params);
    REQUIRE(segs.size() == 2);
    std::vector<double> xs;
    for (const auto& s : segs) xs.push_back(0.5 * (s.x1 + s.x2));
    std::sort(xs.begin(), xs.end());
    CHECK(std::abs(xs[0] - 50) <= 2);
    CHECK(std::abs(xs[1] - 150) <= 2);
}

TEST_CASE("hough: deterministic for a fixed seed") {
    std::mt19937_64 rng(77);
    BinaryImage img = blank(100, 100);
    draw_vertical(img, 30, 0, 99);
    std::uniform_int_distribution<int> d(0, 99);
    for (int i = 0; i < 300; ++i) img.set(d(rng), d(rng), true);
    HoughParams params;
    params.threshold = 40;
    const auto a = hough_line_segments(img, params);
    const auto b = hough_line_segments(img, params);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x1 == b[i].x1);
        CHECK(a[i].y1 == b[i].y1);
        CHECK(a[i].x2 == b[i].x2);
        CHECK(a[i].y2 == b[i].y2);
    }
}

TEST_CASE("classify: vertical segment example") {
    const std::vector<LineSegment> segs{{10, 0, 10, 100}};
    const auto out = classify_and_filter(segs, 200, 101, 10 * kDeg);
    REQUIRE(out.vertical.size() == 1);
    CHECK(out.horizontal.empty());
    CHECK(out.vertical[0].angle == 0.0);
    CHECK(out.vertical[0].position == 10.0);
}

TEST_CASE("classify: 45 degree segment is dropped") {
    const std::vector<LineSegment> segs{{0, 0, 100, 100}};
    const auto out = classify_and_filter(segs, 200, 200, 10 * kDeg);
    CHECK(out.vertical.empty());
    CHECK(out.horizontal.empty());
}

TEST_CASE("classify: shallow horizontal segment position at mid-width") {
    // Segment from (0,50) to (100,52) on a 101x100 image.
    const std::vector<LineSegment> segs{{0, 50, 100, 52}};
    const auto out = classify_and_filter(segs, 101, 100, 10 * kDeg);
    REQUIRE(out.horizontal.size() == 1);
    CHECK(out.horizontal[0].angle == doctest::Approx(std::atan2(2.0, 100.0)).epsilon(1e-12));
    CHECK(out.horizontal[0].position == doctest::Approx(51.0).epsilon(1e-12));
}

TEST_CASE("classify: every returned line satisfies the angle bound") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> coord(0.0, 199.0);
    std::vector<LineSegment> segs;
    for (int i = 0; i < 500; ++i) segs.push_back({coord(rng), coord(rng), coord(rng), coord(rng)});
    const double max_angle = 8 * kDeg;
    const auto out = classify_and_filter(segs, 200, 200, max_angle);
    for (const auto& l : out.vertical) CHECK(std::abs(l.angle) <= max_angle);
    for (const auto& l : out.horizontal) CHECK(std::abs(l.angle) <= max_angle);
    CHECK(out.vertical.size() + out.horizontal.size() <= segs.size());
}

TEST_CASE("classify: transpose duality") {
    std::mt19937_64 rng(321);
    std::uniform_real_distribution<double> coord(10.0, 180.0);
    std::uniform_real_distribution<double> tilt(-20.0, 20.0);
    std::vector<LineSegment> segs, mirrored;
    for (int i = 0; i < 60; ++i) {
        const double x = coord(rng), y0 = coord(rng);
        LineSegment s{x, y0, x + tilt(rng), y0 + 90.0};
        segs.push_back(s);
        mirrored.push_back({s.y1, s.x1, s.y2, s.x2});
    }
    const int w = 200, h = 200;
    const auto a = classify_and_filter(segs, w, h, 13 * kDeg);
    const auto b = classify_and_filter(mirrored, h, w, 13 * kDeg);
    REQUIRE(a.vertical.size() == b.horizontal.size());
    for (size_t i = 0; i < a.vertical.size(); ++i) {
        CHECK(a.vertical[i].position == doctest::Approx(b.horizontal[i].position).epsilon(1e-12));
        CHECK(a.vertical[i].angle == doctest::Approx(-b.horizontal[i].angle).epsilon(1e-12));
    }
}

TEST_CASE("classify: max_angle validation") {
    CHECK_THROWS(classify_and_filter({}, 10, 10, 0.0));
    CHECK_THROWS(classify_and_filter({}, 10, 10, kPi / 3));
}
