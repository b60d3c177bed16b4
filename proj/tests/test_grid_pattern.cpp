#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "elproc/error.hpp"
#include "elproc/grid_pattern.hpp"
#include "test_support.hpp"

using namespace elproc;
using namespace elproc::test;

namespace {

// Brute-force evaluation of the constrained pattern optimization: loop every
// feasible (a, b), score by testing each column against every pattern line.
struct NaiveBest {
    PatternParam h;
    double score = -1.0;
};

double naive_score(const ColumnProfile& profile, int a, int b, const GapSpec& spec,
                   double radius) {
    double score = 0.0;
    for (int x = 0; x < profile.size(); ++x) {
        bool hit = false;
        for (int l = 0; l < spec.line_count() && !hit; ++l) {
            const double delta = spec.cumulative[l];
            const double d = spec.radius_scale[l];
            hit = std::abs(a * (1.0 - delta) + b * delta - x) <= radius * d;
        }
        if (hit) score += profile.weights[x];
    }
    return score;
}

NaiveBest naive_detect(const ColumnProfile& profile, const GapSpec& spec,
                       const PatternConstraints& c) {
    NaiveBest best;
    const int w = profile.size();
    for (int a = 0; a <= w; ++a)
        for (int b = a + c.min_extent; b <= std::min(w, a + c.max_extent); ++b) {
            const double score = naive_score(profile, a, b, spec, c.accuracy_radius);
            const int width = b - a, best_width = best.h.last - best.h.first;
            if (score > best.score ||
                (score == best.score &&
                 (width < best_width || (width == best_width && a < best.h.first)))) {
                best.score = score;
                best.h = {a, b};
            }
        }
    return best;
}

ColumnProfile spikes(int w, std::initializer_list<std::pair<int, double>> list) {
    ColumnProfile p;
    p.weights.assign(w, 0.0);
    for (const auto& [x, v] : list) p.weights[x] = v;
    return p;
}

}  // namespace

TEST_CASE("cumulative_deltas: worked examples") {
    const GapSpec equal = cumulative_deltas({1, 1, 1});
    REQUIRE(equal.line_count() == 4);
    CHECK(equal.cumulative[0] == 0.0);
    CHECK(equal.cumulative[1] == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(equal.cumulative[2] == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(equal.cumulative[3] == 1.0);

    const GapSpec two = cumulative_deltas({2, 1});
    CHECK(two.cumulative == std::vector<double>{0.0, 2.0 / 3, 1.0});

    const GapSpec single = cumulative_deltas({5});
    CHECK(single.cumulative == std::vector<double>{0.0, 1.0});

    CHECK_THROWS_AS(cumulative_deltas({}), Error);
    CHECK_THROWS_AS(cumulative_deltas({1, 0, 1}), Error);
}

TEST_CASE("column_profile: basics and mass property") {
    BinaryImage img(8, 5);
    CHECK(column_profile(img, ProfileAxis::kX).weights == std::vector<double>(8, 0.0));

    for (int y = 0; y < 5; ++y) img.set(3, y, true);
    const ColumnProfile p = column_profile(img, ProfileAxis::kX);
    CHECK(p.weights[3] == 5.0);
    CHECK(p.total() == 5.0);

    std::mt19937_64 rng(3);
    BinaryImage rnd(17, 13);
    std::uniform_int_distribution<int> coin(0, 3);
    for (auto& m : rnd.mask) m = coin(rng) == 0;
    CHECK(column_profile(rnd, ProfileAxis::kX).total() == static_cast<double>(rnd.count()));
    CHECK(column_profile(rnd, ProfileAxis::kY).total() == static_cast<double>(rnd.count()));

    const ColumnProfile py = column_profile(rnd, ProfileAxis::kY);
    const ColumnProfile pt = column_profile(transpose(rnd), ProfileAxis::kX);
    CHECK(py.weights == pt.weights);
}

TEST_CASE("feasible_line_hit: endpoints always hit, appendix boundary case") {
    const GapSpec equal4 = cumulative_deltas({1, 1, 1});
    CHECK(feasible_line_hit({17, 90}, equal4, 17.0, 5.0));  // x = a via l = 0
    CHECK(feasible_line_hit({17, 90}, equal4, 90.0, 5.0));  // x = b via l = n-1

    // a=0, b=90: line 1 sits at 30 with d_1 = sqrt(5)/3, so R*d = 3.727.
    CHECK(!feasible_line_hit({0, 90}, equal4, 34.0, 5.0));
    CHECK(feasible_line_hit({0, 90}, equal4, 33.0, 5.0));
}

TEST_CASE("pattern_score: zero profile, perfect hits, oracle equality") {
    const GapSpec spec = cumulative_deltas({1, 2, 1});
    ColumnProfile zero;
    zero.weights.assign(120, 0.0);
    CHECK(pattern_score(zero, {10, 90}, spec, 5.0) == 0.0);

    // Unit mass exactly at the four line positions of h = (12, 92).
    ColumnProfile perfect;
    perfect.weights.assign(120, 0.0);
    for (double d : spec.cumulative)
        perfect.weights[static_cast<int>(std::lround(12 + d * 80))] = 1.0;
    CHECK(pattern_score(perfect, {12, 92}, spec, 5.0) == 4.0);

    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> weight(0, 9);
    ColumnProfile rnd;
    rnd.weights.resize(60);
    for (double& w : rnd.weights) w = weight(rng);
    for (int a = 0; a <= 60; a += 7)
        for (int b = a + 10; b <= std::min(60, a + 40); b += 5)
            CHECK(pattern_score(rnd, {a, b}, spec, 3.0) == naive_score(rnd, a, b, spec, 3.0));
}

TEST_CASE("detect_pattern: four spikes recover the generating pattern") {
    const GapSpec spec = cumulative_deltas({1, 1, 1});
    const ColumnProfile profile =
        spikes(110, {{10, 5.0}, {40, 5.0}, {70, 5.0}, {100, 5.0}});
    PatternConstraints c{50, 100, 5.0};
    const PatternDetection det = detect_pattern(profile, spec, c);
    CHECK(det.h.first == 10);
    CHECK(det.h.last == 100);
    const NaiveBest naive = naive_detect(profile, spec, c);
    CHECK(naive.h.first == det.h.first);
    CHECK(naive.h.last == det.h.last);
    CHECK(naive.score == det.score);

    // Perturbed spikes stay within the accuracy radius.
    const ColumnProfile wobble =
        spikes(110, {{12, 5.0}, {38, 5.0}, {71, 5.0}, {99, 5.0}});
    const PatternDetection det2 = detect_pattern(wobble, spec, c);
    CHECK(std::abs(det2.h.first - 10) <= 2);
    CHECK(std::abs(det2.h.last - 100) <= 2);
    const NaiveBest naive2 = naive_detect(wobble, spec, c);
    CHECK(naive2.h.first == det2.h.first);
    CHECK(naive2.h.last == det2.h.last);
}

TEST_CASE("detect_pattern: tie-break picks smallest extent then smallest first") {
    const GapSpec spec = cumulative_deltas({1});  // two lines
    const ColumnProfile profile = spikes(100, {{50, 1.0}});
    PatternConstraints c{10, 50, 5.0};
    const PatternDetection det = detect_pattern(profile, spec, c);
    CHECK(det.score == 1.0);
    const NaiveBest naive = naive_detect(profile, spec, c);
    CHECK(det.h.first == naive.h.first);
    CHECK(det.h.last == naive.h.last);
    // Width 10 (minimum) and the earliest a whose trailing line reaches 50.
    CHECK(det.h.last - det.h.first == 10);
    CHECK(det.h.first == 35);
}

TEST_CASE("detect_pattern: equals the naive oracle on random profiles") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> width(20, 45);
        const int w = width(rng);
        std::uniform_int_distribution<int> gaps_n(1, 5);
        std::uniform_real_distribution<double> gap(0.5, 3.0);
        std::vector<double> gaps(gaps_n(rng));
        for (double& g : gaps) g = gap(rng);
        const GapSpec spec = cumulative_deltas(gaps);

        ColumnProfile profile;
        profile.weights.resize(w);
        std::uniform_int_distribution<int> weight(0, 6);
        for (double& v : profile.weights) v = weight(rng);

        std::uniform_int_distribution<int> lo(2, w / 2), hi(w / 2, w);
        PatternConstraints c{lo(rng), hi(rng), 2.5};
        const PatternDetection det = detect_pattern(profile, spec, c);
        const NaiveBest naive = naive_detect(profile, spec, c);
        CHECK(det.h.first == naive.h.first);
        CHECK(det.h.last == naive.h.last);
        CHECK(det.score == naive.score);
    }
}

TEST_CASE("detect_pattern: score is monotone in the accuracy radius") {
    std::mt19937_64 rng(23);
    ColumnProfile profile;
    profile.weights.resize(80);
    std::uniform_int_distribution<int> weight(0, 4);
    for (double& v : profile.weights) v = weight(rng);
    const GapSpec spec = cumulative_deltas({1, 2});
    for (int a = 0; a <= 80; a += 9)
        for (int b = a + 20; b <= std::min(80, a + 60); b += 11)
            for (double r1 : {0.5, 1.0, 2.0, 4.0})
                CHECK(pattern_score(profile, {a, b}, spec, r1) <=
                      pattern_score(profile, {a, b}, spec, 2 * r1));
}

TEST_CASE("detect_pattern: translation equivariance away from borders") {
    const GapSpec spec = cumulative_deltas({1, 1});
    const ColumnProfile base = spikes(140, {{30, 7.0}, {55, 4.0}, {80, 7.0}});
    PatternConstraints c{30, 70, 4.0};
    const PatternDetection d0 = detect_pattern(base, spec, c);
    const int s = 9;
    const ColumnProfile shifted = spikes(140, {{39, 7.0}, {64, 4.0}, {89, 7.0}});
    const PatternDetection d1 = detect_pattern(shifted, spec, c);
    CHECK(d1.h.first == d0.h.first + s);
    CHECK(d1.h.last == d0.h.last + s);
    CHECK(d1.score == d0.score);
}

TEST_CASE("detect_pattern: gap reversal mirrors the detection") {
    const GapSpec spec = cumulative_deltas({3, 1, 2});
    std::vector<double> reversed_gaps{2, 1, 3};
    const GapSpec rspec = cumulative_deltas(reversed_gaps);
    const int w = 130;
    const ColumnProfile profile =
        spikes(w, {{20, 6.0}, {70, 3.0}, {86, 5.0}, {119, 6.0}});
    ColumnProfile mirror;
    mirror.weights.assign(w, 0.0);
    for (int x = 0; x < w; ++x) mirror.weights[w - 1 - x] = profile.weights[x];
    PatternConstraints c{60, 120, 4.0};
    const PatternDetection d = detect_pattern(profile, spec, c);
    const PatternDetection dm = detect_pattern(mirror, rspec, c);
    CHECK(dm.h.first == w - 1 - d.h.last);
    CHECK(dm.h.last == w - 1 - d.h.first);
    CHECK(dm.score == d.score);
}

TEST_CASE("detect_pattern: infeasible constraints throw") {
    ColumnProfile small;
    small.weights.assign(10, 1.0);
    const GapSpec spec = cumulative_deltas({1});
    CHECK_THROWS_AS(detect_pattern(small, spec, {20, 30, 5.0}), Error);
    CHECK_THROWS_AS(detect_pattern(small, spec, {8, 4, 5.0}), Error);
}
