#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "elproc/cell_detect.hpp"
#include "elproc/error.hpp"
#include "elproc/synth.hpp"
#include "test_support.hpp"

using namespace elproc;
using namespace elproc::test;

namespace {

const char* kDemoSpec =
    "name = demo\nvertical_gaps = 1 1 1 1\nhorizontal_gaps = 1 1 1\n"
    "min_width_frac = 0.3\nmax_width_frac = 0.95\n";

SynthModule demo(uint64_t seed) {
    RenderParams params;
    params.canvas_w = 640;
    params.canvas_h = 480;
    params.noise_sigma = 0.01;
    params.seed = seed;
    return render_module(ModuleSpec::parse(kDemoSpec), params);
}

}  // namespace

TEST_CASE("module spec: parse, serialize, reject bad input") {
    const ModuleSpec spec = ModuleSpec::parse(kDemoSpec);
    CHECK(spec.name == "demo");
    CHECK(spec.vertical_gaps.size() == 4);
    CHECK(spec.vertical_line_count() == 5);
    CHECK(spec.min_width_frac == 0.3);

    const ModuleSpec round = ModuleSpec::parse(spec.serialize());
    CHECK(round.vertical_gaps == spec.vertical_gaps);
    CHECK(round.max_width_frac == spec.max_width_frac);

    CHECK_THROWS_AS(ModuleSpec::parse("name = x\nbogus_key = 1\n"), Error);
    CHECK_THROWS_AS(ModuleSpec::parse("name = x\nvertical_gaps = 1 1\n"), Error);
    CHECK_THROWS_AS(ModuleSpec::parse(
                        "name = x\nvertical_gaps = 1 1\nhorizontal_gaps = 1\n"
                        "cell_mask_vertical = 1\n"),
                    Error);
    CHECK_THROWS_AS(ModuleSpec::load("/nonexistent/spec"), IoError);
}

TEST_CASE("module spec: shipped example file parses") {
    const ModuleSpec spec =
        ModuleSpec::load(std::string(ELPROC_SOURCE_DIR) + "/docs/module-spec-example.spec");
    CHECK(spec.name == "example-4x3-framed");
    CHECK(spec.vertical_gaps.size() == 6);
    CHECK(spec.cell_mask_vertical ==
          std::vector<bool>{false, true, true, true, true, false});
    CHECK(spec.cell_mask_horizontal == std::vector<bool>{false, true, true, true, false});
}

TEST_CASE("detect_cells: clean synthetic module within the accuracy radius") {
    const SynthModule mod = demo(20);
    const ModuleSpec spec = ModuleSpec::parse(kDemoSpec);
    const CellGrid grid = detect_cells(mod.image, spec);
    REQUIRE(grid.vertical_lines.size() == mod.truth.vertical_lines.size());
    REQUIRE(grid.horizontal_lines.size() == mod.truth.horizontal_lines.size());
    for (size_t i = 0; i < grid.vertical_lines.size(); ++i)
        CHECK(std::abs(grid.vertical_lines[i] - mod.truth.vertical_lines[i]) <= 5);
    for (size_t i = 0; i < grid.horizontal_lines.size(); ++i)
        CHECK(std::abs(grid.horizontal_lines[i] - mod.truth.horizontal_lines[i]) <= 5);
    CHECK(grid.rows() * grid.cols() == 12);
}

TEST_CASE("detect_cells: reconstructed endpoints equal the detected h exactly") {
    const SynthModule mod = demo(21);
    const CellGrid grid = detect_cells(mod.image, ModuleSpec::parse(kDemoSpec));
    CHECK(grid.vertical_lines.front() == grid.vertical_detection.h.first);
    CHECK(grid.vertical_lines.back() == grid.vertical_detection.h.last);
    CHECK(grid.horizontal_lines.front() == grid.horizontal_detection.h.first);
    CHECK(grid.horizontal_lines.back() == grid.horizontal_detection.h.last);
}

TEST_CASE("detect_cells: translation equivariance on the torus") {
    const SynthModule mod = demo(22);
    const ModuleSpec spec = ModuleSpec::parse(kDemoSpec);
    const CellGrid base = detect_cells(mod.image, spec);
    const CellGrid moved = detect_cells(torus_shift(mod.image, 37, 21), spec);
    for (size_t i = 0; i < base.vertical_lines.size(); ++i)
        CHECK(std::abs(moved.vertical_lines[i] - base.vertical_lines[i] - 37) <= 5);
    for (size_t i = 0; i < base.horizontal_lines.size(); ++i)
        CHECK(std::abs(moved.horizontal_lines[i] - base.horizontal_lines[i] - 21) <= 5);
}

TEST_CASE("detect_cells: pure noise reports module not found") {
    std::mt19937_64 rng(5);
    const GrayImage noise = random_image(200, 160, rng);
    CHECK_THROWS_AS(detect_cells(noise, ModuleSpec::parse(kDemoSpec)), ModuleNotFound);
}

TEST_CASE("crop_cells: 2x2 grid cuts four 50x50 tiles") {
    std::mt19937_64 rng(6);
    const GrayImage img = random_image(100, 100, rng);
    CellGrid grid;
    grid.vertical_lines = {0, 50, 100};
    grid.horizontal_lines = {0, 50, 100};
    grid.cells = {{{0, 0, 50, 50}, {50, 0, 100, 50}},
                  {{0, 50, 50, 100}, {50, 50, 100, 100}}};
    const auto crops = crop_cells(img, grid);
    REQUIRE(crops.size() == 4);
    for (const auto& c : crops) {
        CHECK(c.width == 50);
        CHECK(c.height == 50);
    }
    CHECK(crops[0].at(10, 20) == img.at(10, 20));
    CHECK(crops[3].at(10, 20) == img.at(60, 70));

    // Reassembling the native crops reproduces the module region.
    GrayImage stitched(100, 100, -1.0);
    int idx = 0;
    for (int r = 0; r < grid.rows(); ++r)
        for (int c = 0; c < grid.cols(); ++c, ++idx) {
            const CellRect& rect = grid.cells[r][c];
            for (int y = 0; y < crops[idx].height; ++y)
                for (int x = 0; x < crops[idx].width; ++x)
                    stitched.at(rect.x0 + x, rect.y0 + y) = crops[idx].at(x, y);
        }
    for (int y = 0; y < 100; ++y)
        for (int x = 0; x < 100; ++x) CHECK(stitched.at(x, y) == img.at(x, y));

    // Resampled mode produces the requested size.
    const auto small = crop_cells(img, grid, 16, 12);
    CHECK(small.front().width == 16);
    CHECK(small.front().height == 12);
}

TEST_CASE("overlay: draws the grid, idempotent, empty grid is a no-op") {
    GrayImage img(60, 40, 0.0);
    img.at(0, 0) = 255.0;  // intensity anchor away from the grid
    CellGrid grid;
    grid.vertical_lines = {10, 30, 50};
    grid.horizontal_lines = {8, 32};
    const GrayImage over = render_detection_overlay(img, grid);
    // Changed pixels = vertical lines spanning 25 rows each, plus horizontal
    // lines spanning 41 columns each, minus the 6 shared intersections.
    int changed = 0;
    for (size_t i = 0; i < over.pixels.size(); ++i)
        if (over.pixels[i] != img.pixels[i]) ++changed;
    CHECK(changed == 3 * 25 + 2 * 41 - 6);
    CHECK(render_detection_overlay(over, grid) == over);

    const GrayImage same = render_detection_overlay(img, CellGrid{});
    CHECK(same == img);
}

TEST_CASE("detect_cells: framed spec masks margins out of the cell matrix") {
    RenderParams params;
    params.canvas_w = 640;
    params.canvas_h = 480;
    params.noise_sigma = 0.005;
    params.seed = 77;
    const ModuleSpec spec =
        ModuleSpec::load(std::string(ELPROC_SOURCE_DIR) + "/docs/module-spec-example.spec");
    const SynthModule mod = render_module(spec, params);
    const CellGrid grid = detect_cells(mod.image, spec);
    CHECK(grid.rows() == 3);
    CHECK(grid.cols() == 4);
}
