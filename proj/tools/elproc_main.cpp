#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "elproc/cell_detect.hpp"
#include "elproc/error.hpp"
#include "elproc/image_io.hpp"
#include "elproc/one_cell.hpp"
#include "elproc/pipeline.hpp"
#include "elproc/perspective.hpp"
#include "elproc/rotation.hpp"
#include "elproc/synth.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

struct PerspectiveFlags {
    int usan_long = 5;
    int usan_short = 3;
    double usan_p = 0.4;
    double usan_t = 0.5;
    int hough_threshold = 50;
    double hough_max_gap = 75.0;
    double hough_min_length = 0.0;
    double max_angle_deg = 10.0;
    std::string regression = "theilsen";
    uint64_t seed = 0x9e3779b97f4a7c15ull;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--usan-H", usan_long, "USAN kernel long side (px)");
        cmd->add_option("--usan-h", usan_short, "USAN kernel short side (px)");
        cmd->add_option("--usan-p", usan_p, "USAN area fraction");
        cmd->add_option("--usan-t", usan_t, "USAN similarity threshold (standardized units)");
        cmd->add_option("--hough-threshold", hough_threshold, "Hough line vote threshold");
        cmd->add_option("--hough-max-gap", hough_max_gap, "max gap between points on a line (px)");
        cmd->add_option("--hough-min-length", hough_min_length,
                        "min segment length (px); 0 = 0.2*min(W,H)");
        cmd->add_option("--max-angle-deg", max_angle_deg, "slope filter half-interval (deg)");
        cmd->add_option("--regression", regression, "theilsen|ols")
            ->check(CLI::IsMember({"theilsen", "ols"}));
        cmd->add_option("--seed", seed, "Hough sampling seed");
    }

    elproc::PerspectiveOptions to_options() const {
        elproc::PerspectiveOptions opt;
        opt.usan = {usan_long, usan_short, usan_p, usan_t};
        opt.hough.threshold = hough_threshold;
        opt.hough.max_gap = hough_max_gap;
        opt.hough.min_length = hough_min_length;
        opt.hough.seed = seed;
        opt.max_angle = deg2rad(max_angle_deg);
        opt.regression = regression == "ols" ? elproc::RegressionMethod::kOls
                                             : elproc::RegressionMethod::kTheilSen;
        return opt;
    }
};

struct CellFlags {
    double radius = 5.0;
    double canny_low = 25.0;
    double canny_high = 75.0;
    int canny_kernel = 3;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--R", radius, "pattern accuracy radius (px)");
        cmd->add_option("--canny-low", canny_low, "Canny lower threshold");
        cmd->add_option("--canny-high", canny_high, "Canny upper threshold");
        cmd->add_option("--canny-kernel", canny_kernel, "Canny Sobel aperture");
    }

    elproc::CellDetectOptions to_options() const {
        elproc::CellDetectOptions opt;
        opt.canny = {canny_low, canny_high, canny_kernel};
        opt.accuracy_radius = radius;
        return opt;
    }
};

struct RotationFlags {
    double eps_deg = 0.05;
    int coarse_steps = 46;
    int downsample = 4;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--eps-deg", eps_deg, "golden-section bracket width (deg)");
        cmd->add_option("--coarse-steps", coarse_steps,
                        "coarse grid evaluations before refinement; 0 = pure golden-section");
        cmd->add_option("--downsample", downsample, "objective downsampling factor");
    }

    elproc::RotationOptions to_options() const {
        elproc::RotationOptions opt;
        opt.eps = deg2rad(eps_deg);
        opt.coarse_steps = coarse_steps;
        opt.downsample = downsample;
        return opt;
    }
};

std::string default_module_spec_text() {
    return "name = demo-4x3\n"
           "vertical_gaps = 1 1 1 1\n"
           "horizontal_gaps = 1 1 1\n"
           "min_width_frac = 0.3\n"
           "max_width_frac = 0.95\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EL image preprocessing: rotation/perspective correction and solar cell "
                 "detection"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // rotate-correct
    auto* rot_cmd = app.add_subcommand("rotate-correct", "correct rotation distortion");
    RotationFlags rot_flags;
    rot_flags.add_to(rot_cmd);
    std::string rot_input, rot_output = "corrected.png";
    rot_cmd->add_option("input", rot_input, "input image")->required();
    rot_cmd->add_option("-o,--output", rot_output, "output image path");

    // perspective-correct
    auto* persp_cmd = app.add_subcommand("perspective-correct", "correct perspective distortion");
    PerspectiveFlags persp_flags;
    persp_flags.add_to(persp_cmd);
    std::string persp_input, persp_output = "corrected.png", persp_hmat_path;
    persp_cmd->add_option("input", persp_input, "input image")->required();
    persp_cmd->add_option("-o,--output", persp_output, "output image path");
    persp_cmd->add_option("--emit-homography", persp_hmat_path,
                          "write the estimated homography as a 9-number JSON array");

    // detect-cells
    auto* cells_cmd = app.add_subcommand("detect-cells", "detect grid lines and crop cells");
    CellFlags cell_flags;
    cell_flags.add_to(cells_cmd);
    std::string cells_input, cells_spec, cells_out_dir = "cells";
    bool cells_overlay = false;
    std::string cells_out_size;
    cells_cmd->add_option("input", cells_input, "input image")->required();
    cells_cmd->add_option("--spec", cells_spec, "module spec file")->required();
    cells_cmd->add_option("--out-dir", cells_out_dir, "directory for cell crops");
    cells_cmd->add_flag("--overlay", cells_overlay, "also write a grid overlay image");
    cells_cmd->add_option("--out-size", cells_out_size, "resample crops to WxH");

    // extract-cell
    auto* one_cmd = app.add_subcommand("extract-cell", "one-cell CUSUM extraction");
    std::string one_input, one_output = "cell.png", one_seeds, one_size = "";
    bool one_bilinear = false;
    one_cmd->add_option("input", one_input, "input image")->required();
    one_cmd->add_option("-o,--output", one_output, "output image path");
    one_cmd->add_option("--seeds", one_seeds,
                        "ulx,uly,urx,ury,llx,lly,lrx,lry (default: 25%/75% points)");
    one_cmd->add_option("--out-size", one_size, "output size WxH (default: input size)");
    one_cmd->add_flag("--bilinear", one_bilinear, "bilinear sampling instead of floor");

    // render-synthetic
    auto* render_cmd = app.add_subcommand("render-synthetic", "render a synthetic EL module");
    std::string render_spec, render_output = "synthetic.png", render_truth;
    elproc::RenderParams render_params;
    render_cmd->add_option("--spec", render_spec, "module spec file (default: demo 4x3)");
    render_cmd->add_option("-o,--output", render_output, "output image path");
    render_cmd->add_option("--width", render_params.canvas_w, "canvas width");
    render_cmd->add_option("--height", render_params.canvas_h, "canvas height");
    render_cmd->add_option("--module-width", render_params.module_w, "module width (0 = 60%)");
    render_cmd->add_option("--module-height", render_params.module_h, "module height (0 = 60%)");
    render_cmd->add_option("--contrast", render_params.contrast, "contrast factor");
    render_cmd->add_option("--noise", render_params.noise_sigma, "noise sigma, fraction of 255");
    render_cmd->add_option("--vignette", render_params.vignette, "vignette strength");
    render_cmd->add_option("--line-width", render_params.line_width, "grid line width (px)");
    render_cmd->add_option("--seed", render_params.seed, "render seed");
    render_cmd->add_option("--truth", render_truth, "write ground-truth grid JSON");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo distortion accuracy study");
    RotationFlags sim_rot;
    PerspectiveFlags sim_persp;
    CellFlags sim_cells;
    sim_rot.add_to(sim_cmd);
    sim_persp.add_to(sim_cmd);
    sim_cells.add_to(sim_cmd);
    int sim_images = 10, sim_distortions = 10, sim_jobs = 0;
    uint64_t sim_seed = 12345;
    double sim_noise = 0.02, sim_contrast = 1.0;
    std::string sim_spec, sim_out = "report.csv", sim_summary;
    sim_cmd->add_option("--n-images", sim_images, "number of base images");
    sim_cmd->add_option("--n-distortions", sim_distortions, "distortion draws per image");
    sim_cmd->add_option("--sim-seed", sim_seed, "simulation seed");
    sim_cmd->add_option("--noise", sim_noise, "render noise sigma");
    sim_cmd->add_option("--contrast", sim_contrast, "render contrast");
    sim_cmd->add_option("--spec", sim_spec, "module spec file (default: demo 4x3)");
    sim_cmd->add_option("--out", sim_out, "CSV report path");
    sim_cmd->add_option("--summary", sim_summary, "JSON summary path");
    sim_cmd->add_option("--jobs", sim_jobs, "worker threads (0 = ELPROC_JOBS or 1)");

    // run (full pipeline)
    auto* run_cmd = app.add_subcommand("run", "full pipeline: rotation, perspective, cells");
    RotationFlags run_rot;
    PerspectiveFlags run_persp;
    CellFlags run_cells;
    run_rot.add_to(run_cmd);
    run_persp.add_to(run_cmd);
    run_cells.add_to(run_cmd);
    std::vector<std::string> run_inputs;
    std::string run_spec, run_out_dir = "out";
    int run_jobs = 0;
    bool run_no_overlay = false, run_no_cells = false;
    std::string run_cell_size;
    run_cmd->add_option("inputs", run_inputs, "input images");
    run_cmd->add_option("--spec", run_spec, "module spec file")->required();
    run_cmd->add_option("--out-dir", run_out_dir, "output directory");
    run_cmd->add_option("--jobs", run_jobs, "worker threads (0 = ELPROC_JOBS or 1)");
    run_cmd->add_flag("--no-overlay", run_no_overlay, "skip overlay images");
    run_cmd->add_flag("--no-cells", run_no_cells, "skip cell crops");
    run_cmd->add_option("--cell-size", run_cell_size, "resample crops to WxH");

    CLI11_PARSE(app, argc, argv);

    const auto parse_size = [](const std::string& s, int& w, int& h) {
        if (s.empty()) return;
        const auto x = s.find('x');
        if (x == std::string::npos) throw elproc::Error("size must be WxH: " + s);
        w = std::stoi(s.substr(0, x));
        h = std::stoi(s.substr(x + 1));
    };

    try {
        if (rot_cmd->parsed()) {
            const auto img = elproc::load_image(rot_input);
            const auto res = elproc::correct_rotation(img, rot_flags.to_options());
            elproc::save_image(res.corrected, rot_output);
            std::cout << "rotation_deg " << res.angle * 180.0 / std::numbers::pi
                      << (res.degenerate ? " (degenerate image)" : "") << "\n";
        } else if (persp_cmd->parsed()) {
            const auto img = elproc::load_image(persp_input);
            const auto res = elproc::correct_perspective(img, persp_flags.to_options());
            elproc::save_image(res.corrected, persp_output);
            if (!persp_hmat_path.empty()) {
                std::ofstream out(persp_hmat_path);
                out << nlohmann::json(res.hmat.m).dump() << "\n";
            }
            std::cout << "lines vertical=" << res.vertical_lines
                      << " horizontal=" << res.horizontal_lines << "\n";
        } else if (cells_cmd->parsed()) {
            const auto img = elproc::load_image(cells_input);
            const auto spec = elproc::ModuleSpec::load(cells_spec);
            const auto grid = elproc::detect_cells(img, spec, cell_flags.to_options());
            std::filesystem::create_directories(cells_out_dir);
            int out_w = 0, out_h = 0;
            parse_size(cells_out_size, out_w, out_h);
            const auto crops = elproc::crop_cells(img, grid, out_w, out_h);
            int i = 0;
            for (int r = 0; r < grid.rows(); ++r)
                for (int c = 0; c < grid.cols(); ++c, ++i)
                    elproc::save_image(crops[i],
                                       (std::filesystem::path(cells_out_dir) /
                                        ("cell_r" + std::to_string(r) + "c" +
                                         std::to_string(c) + ".png"))
                                           .string());
            if (cells_overlay)
                elproc::save_image(
                    elproc::render_detection_overlay(img, grid),
                    (std::filesystem::path(cells_out_dir) / "overlay.png").string());
            std::cout << "h_vertical " << grid.vertical_detection.h.first << " "
                      << grid.vertical_detection.h.last << "\nh_horizontal "
                      << grid.horizontal_detection.h.first << " "
                      << grid.horizontal_detection.h.last << "\ncells "
                      << grid.rows() * grid.cols() << "\n";
        } else if (one_cmd->parsed()) {
            const auto img = elproc::load_image(one_input);
            elproc::CornerSeeds seeds = elproc::CornerSeeds::default_for(img.width, img.height);
            if (!one_seeds.empty()) {
                std::array<int, 8> v{};
                std::string s = one_seeds;
                for (char& ch : s)
                    if (ch == ',') ch = ' ';
                std::istringstream in(s);
                for (int& x : v)
                    if (!(in >> x)) throw elproc::Error("--seeds needs 8 integers");
                seeds = {{v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}, {v[6], v[7]}};
            }
            int out_w = img.width, out_h = img.height;
            parse_size(one_size, out_w, out_h);
            const auto cell = elproc::extract_cell(img, seeds, out_w, out_h, one_bilinear);
            elproc::save_image(cell, one_output);
        } else if (render_cmd->parsed()) {
            const auto spec = render_spec.empty()
                                  ? elproc::ModuleSpec::parse(default_module_spec_text())
                                  : elproc::ModuleSpec::load(render_spec);
            const auto synth = elproc::render_module(spec, render_params);
            elproc::save_image(synth.image, render_output);
            if (!render_truth.empty()) {
                nlohmann::json j{{"vertical_lines", synth.truth.vertical_lines},
                                 {"horizontal_lines", synth.truth.horizontal_lines},
                                 {"module_w", synth.module_w},
                                 {"module_h", synth.module_h}};
                std::ofstream out(render_truth);
                out << j.dump(2) << "\n";
            }
        } else if (sim_cmd->parsed()) {
            const auto spec = sim_spec.empty()
                                  ? elproc::ModuleSpec::parse(default_module_spec_text())
                                  : elproc::ModuleSpec::load(sim_spec);
            elproc::RenderParams rp;
            rp.contrast = sim_contrast;
            rp.noise_sigma = sim_noise;
            std::vector<elproc::SynthModule> modules;
            for (int i = 0; i < sim_images; ++i) {
                rp.seed = sim_seed + static_cast<uint64_t>(i) * 1000003ull;
                modules.push_back(elproc::render_module(spec, rp));
            }
            elproc::DistortionRanges ranges;
            ranges.canvas_w = rp.canvas_w;
            ranges.canvas_h = rp.canvas_h;
            ranges.module_w = modules.empty() ? 0 : modules.front().module_w;
            ranges.module_h = modules.empty() ? 0 : modules.front().module_h;
            const auto thetas =
                elproc::sample_distortions(sim_distortions, ranges, sim_seed ^ 0xabcdef);
            elproc::SimulationConfig config;
            config.rotation = sim_rot.to_options();
            config.perspective = sim_persp.to_options();
            config.cells = sim_cells.to_options();
            config.jobs = elproc::resolve_jobs(sim_jobs);
            const auto reports = elproc::evaluate_accuracy(modules, thetas, spec, config);
            elproc::write_report_csv(reports, sim_out);
            const auto summary = elproc::summarize(reports);
            const std::string json = elproc::summary_to_json(summary);
            if (!sim_summary.empty()) {
                std::ofstream out(sim_summary);
                out << json << "\n";
            }
            std::cout << json << "\n";
            if (summary.failures > 0) return 1;
        } else if (run_cmd->parsed()) {
            elproc::PipelineConfig config;
            config.rotation = run_rot.to_options();
            config.perspective = run_persp.to_options();
            config.cells = run_cells.to_options();
            config.module_spec = elproc::ModuleSpec::load(run_spec);
            config.out_dir = run_out_dir;
            config.jobs = run_jobs;
            config.write_overlay = !run_no_overlay;
            config.write_cells = !run_no_cells;
            parse_size(run_cell_size, config.cell_out_w, config.cell_out_h);
            const auto report = elproc::run_pipeline(run_inputs, config);
            for (const auto& rec : report.records)
                if (!rec.ok)
                    std::cerr << "failed: " << rec.input << ": " << rec.error << "\n";
            std::cout << report.records.size() - report.failures << "/"
                      << report.records.size() << " images processed\n";
            if (report.failures > 0) return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
