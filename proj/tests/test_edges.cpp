#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "elproc/edges.hpp"
#include "elproc/error.hpp"
#include "test_support.hpp"

using namespace elproc;
using namespace elproc::test;

namespace {

// Independent USAN oracle: literal window count per the definition.
BinaryImage usan_oracle(const GrayImage& img, const UsanParams& p, Orientation orient) {
    const int wy = orient == Orientation::kVertical ? p.kernel_long : p.kernel_short;
    const int wx = orient == Orientation::kVertical ? p.kernel_short : p.kernel_long;
    BinaryImage out(img.width, img.height);
    for (int y = wy / 2; y < img.height - wy / 2; ++y)
        for (int x = wx / 2; x < img.width - wx / 2; ++x) {
            int similar = 0;
            for (int v = y - wy / 2; v <= y + wy / 2; ++v)
                for (int u = x - wx / 2; u <= x + wx / 2; ++u)
                    if (std::abs(img.at(u, v) - img.at(x, y)) <= p.similarity_threshold)
                        ++similar;
            out.set(x, y, similar <= p.area_fraction * p.kernel_long * p.kernel_short);
        }
    return out;
}

GrayImage vertical_step(int w, int h, double lo, double hi) {
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.at(x, y) = x < w / 2 ? lo : hi;
    return img;
}

}  // namespace

TEST_CASE("usan: constant image has empty foreground") {
    const GrayImage img(20, 20, 3.0);
    CHECK(usan_edges(img, {}, Orientation::kVertical).count() == 0);
    CHECK(usan_edges(img, {}, Orientation::kHorizontal).count() == 0);
}

TEST_CASE("usan: ideal step, oracle-computed foreground") {
    // At p = 0.4 a two-sided step never drops the similar count below
    // 0.4 * 15 = 6 (minimum is 9 for the wide window, 10 for the tall one),
    // so the mask is empty for both orientations; the detector responds to
    // features thinner than the window, not to wide steps.
    const GrayImage img = vertical_step(24, 16, -1.0, 1.0);
    const UsanParams p{5, 3, 0.4, 0.5};
    for (auto orient : {Orientation::kVertical, Orientation::kHorizontal}) {
        const BinaryImage got = usan_edges(img, p, orient);
        CHECK(got == usan_oracle(img, p, orient));
        CHECK(got.count() == 0);
    }

    // With the threshold above the straddle counts the step does appear, and
    // the wide (horizontal) window marks a band at least as thick as the
    // tall one at every p; the frozen widths below come from the oracle.
    UsanParams p85{5, 3, 0.85, 0.5};
    const BinaryImage tall = usan_edges(img, p85, Orientation::kVertical);
    const BinaryImage wide = usan_edges(img, p85, Orientation::kHorizontal);
    CHECK(tall == usan_oracle(img, p85, Orientation::kVertical));
    CHECK(wide == usan_oracle(img, p85, Orientation::kHorizontal));
    int tall_cols = 0, wide_cols = 0;
    for (int x = 0; x < img.width; ++x) {
        if (tall.get(x, 8)) ++tall_cols;
        if (wide.get(x, 8)) ++wide_cols;
    }
    CHECK(tall_cols == 2);
    CHECK(wide_cols == 4);
}

TEST_CASE("usan: single isolated bright pixel is foreground") {
    GrayImage img(15, 15, 0.0);
    img.at(7, 7) = 5.0;
    const UsanParams p{5, 3, 0.4, 0.5};
    const BinaryImage out = usan_edges(img, p, Orientation::kVertical);
    CHECK(out.get(7, 7));  // count = 1 <= 6
}

TEST_CASE("usan: one-pixel dark lines are detected") {
    GrayImage img(30, 30, 1.0);
    for (int y = 0; y < 30; ++y) img.at(14, y) = -1.5;  // vertical line
    const UsanParams p{5, 3, 0.4, 0.5};
    // Tall window on the line: 5 similar <= 6 -> marked along the line.
    const BinaryImage tall = usan_edges(img, p, Orientation::kVertical);
    for (int y = 3; y < 27; ++y) CHECK(tall.get(14, y));
    CHECK(tall == usan_oracle(img, p, Orientation::kVertical));
}

TEST_CASE("usan: transpose duality is exact") {
    std::mt19937_64 rng(5);
    const GrayImage img = standardize(random_image(25, 18, rng));
    const UsanParams p{5, 3, 0.4, 0.5};
    const BinaryImage direct = usan_edges(img, p, Orientation::kVertical);
    const BinaryImage via_t = transpose(usan_edges(transpose(img), p, Orientation::kHorizontal));
    CHECK(direct == via_t);
}

TEST_CASE("usan: monotonicity in the area fraction") {
    std::mt19937_64 rng(9);
    const GrayImage img = standardize(random_image(22, 22, rng));
    UsanParams p1{5, 3, 0.2, 0.5}, p2{5, 3, 0.6, 0.5};
    const BinaryImage small = usan_edges(img, p1, Orientation::kVertical);
    const BinaryImage large = usan_edges(img, p2, Orientation::kVertical);
    for (size_t i = 0; i < small.mask.size(); ++i)
        if (small.mask[i]) CHECK(large.mask[i]);
}

TEST_CASE("usan: kernel larger than image throws") {
    const GrayImage img(4, 4, 0.0);
    CHECK_THROWS_AS(usan_edges(img, {5, 3, 0.4, 0.5}, Orientation::kVertical), Error);
}

TEST_CASE("canny: constant image has empty foreground") {
    CHECK(canny_edges(GrayImage(16, 16, 9.0), {}).count() == 0);
}

TEST_CASE("canny: ideal step yields one 1-px vertical line") {
    const GrayImage img = vertical_step(40, 20, 0.0, 200.0);
    const BinaryImage out = canny_edges(img, {});
    // Exactly one marked column, adjacent to the step at x = 20.
    for (int y = 2; y < 18; ++y) {
        int cols = 0, where = -1;
        for (int x = 0; x < 40; ++x)
            if (out.get(x, y)) {
                ++cols;
                where = x;
            }
        CHECK(cols == 1);
        CHECK(std::abs(where - 20) <= 1);
    }
}

TEST_CASE("canny: small step below the low threshold is ignored") {
    // Full-range anchors pin the [0, 255] rescale so the embedded step of
    // amplitude 10 keeps its gradient below low = 25.
    GrayImage img(40, 20, 100.0);
    for (int y = 0; y < 20; ++y)
        for (int x = 20; x < 40; ++x) img.at(x, y) = 110.0;
    img.at(0, 0) = 0.0;
    img.at(39, 19) = 255.0;
    const BinaryImage out = canny_edges(img, {});
    for (int y = 3; y < 17; ++y)
        for (int x = 15; x < 25; ++x) CHECK(!out.get(x, y));
}

TEST_CASE("canny: invariant under exact affine rescaling") {
    std::mt19937_64 rng(15);
    GrayImage img = random_image(30, 24, rng, 0.0, 255.999, true);
    GrayImage scaled = img;
    for (double& v : scaled.pixels) v = v * 4.0 + 32.0;  // exact in binary fp
    CHECK(canny_edges(img, {}) == canny_edges(scaled, {}));
}

TEST_CASE("canny: parameter validation") {
    const GrayImage img(8, 8, 0.0);
    CHECK_THROWS_AS(canny_edges(img, {75.0, 25.0, 3}), Error);
    CHECK_THROWS_AS(canny_edges(img, {25.0, 75.0, 4}), Error);
    CHECK_THROWS_AS(canny_edges(GrayImage(), {}), Error);
}

TEST_CASE("canny: aperture 5 detects the same ideal step") {
    const GrayImage img = vertical_step(40, 20, 0.0, 200.0);
    const BinaryImage out = canny_edges(img, {25.0, 75.0, 5});
    int marked = 0;
    for (int x = 0; x < 40; ++x)
        if (out.get(x, 10)) ++marked;
    CHECK(marked >= 1);
    CHECK(marked <= 2);
}
