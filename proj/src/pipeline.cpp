#include "elproc/pipeline.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "elproc/error.hpp"
#include "elproc/image_io.hpp"

namespace elproc {

namespace fs = std::filesystem;

int resolve_jobs(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ELPROC_JOBS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

namespace {

std::string output_stem(const std::vector<std::string>& inputs, size_t index) {
    const std::string stem = fs::path(inputs[index]).stem().string();
    for (size_t i = 0; i < inputs.size(); ++i) {
        if (i != index && fs::path(inputs[i]).stem().string() == stem)
            return stem + "_" + std::to_string(index);
    }
    return stem;
}

ImageRecord process_one(const std::string& input, const std::string& stem,
                        const PipelineConfig& config) {
    ImageRecord rec;
    rec.input = input;
    try {
        const GrayImage img = load_image(input);
        const RotationResult rres = correct_rotation(img, config.rotation);
        const PerspectiveResult pres = correct_perspective(rres.corrected, config.perspective);
        const CellGrid grid = detect_cells(pres.corrected, config.module_spec, config.cells);

        rec.rotation_deg = rres.angle * 180.0 / 3.14159265358979323846;
        rec.homography = pres.hmat.m;
        rec.h_vertical = grid.vertical_detection.h;
        rec.h_horizontal = grid.horizontal_detection.h;
        rec.cell_count = grid.rows() * grid.cols();

        const fs::path out_dir(config.out_dir);
        if (config.write_corrected)
            save_image(pres.corrected, (out_dir / (stem + "_corrected.png")).string());
        if (config.write_overlay)
            save_image(render_detection_overlay(pres.corrected, grid),
                       (out_dir / (stem + "_overlay.png")).string());
        if (config.write_cells) {
            const fs::path cell_dir = out_dir / "cells";
            fs::create_directories(cell_dir);
            const auto crops = crop_cells(pres.corrected, grid, config.cell_out_w,
                                          config.cell_out_h);
            int i = 0;
            for (int r = 0; r < grid.rows(); ++r)
                for (int c = 0; c < grid.cols(); ++c, ++i) {
                    const std::string name =
                        stem + "_r" + std::to_string(r) + "c" + std::to_string(c) + ".png";
                    save_image(crops[i], (cell_dir / name).string());
                }
        }
        rec.ok = true;
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
    }
    return rec;
}

}  // namespace

PipelineReport run_pipeline(const std::vector<std::string>& inputs,
                            const PipelineConfig& config) {
    fs::create_directories(config.out_dir);
    PipelineReport report;
    report.records.resize(inputs.size());

    std::atomic<size_t> next{0};
    const auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= inputs.size()) break;
            report.records[i] = process_one(inputs[i], output_stem(inputs, i), config);
            report.records[i].index = static_cast<int>(i);
        }
    };
    const int jobs = resolve_jobs(config.jobs);
    if (jobs == 1 || inputs.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::ofstream jsonl(fs::path(config.out_dir) / "results.jsonl");
    for (const auto& rec : report.records) {
        nlohmann::json j{{"index", rec.index},
                         {"input", rec.input},
                         {"status", rec.ok ? "ok" : "failed"}};
        if (rec.ok) {
            j["rotation_deg"] = rec.rotation_deg;
            j["homography"] = rec.homography;
            j["h_vertical"] = {rec.h_vertical.first, rec.h_vertical.last};
            j["h_horizontal"] = {rec.h_horizontal.first, rec.h_horizontal.last};
            j["cells"] = rec.cell_count;
        } else {
            j["error"] = rec.error;
            ++report.failures;
        }
        jsonl << j.dump() << "\n";
    }
    return report;
}

}  // namespace elproc
