#ifndef ELPROC_PIPELINE_HPP
#define ELPROC_PIPELINE_HPP

#include <string>
#include <vector>

#include "elproc/cell_detect.hpp"
#include "elproc/perspective.hpp"
#include "elproc/rotation.hpp"

namespace elproc {

struct PipelineConfig {
    RotationOptions rotation;
    PerspectiveOptions perspective;
    CellDetectOptions cells;
    ModuleSpec module_spec;
    std::string out_dir = ".";
    int jobs = 0;  // 0 -> ELPROC_JOBS env var, else 1
    bool write_corrected = true;
    bool write_overlay = true;
    bool write_cells = true;
    int cell_out_w = 0;  // 0 -> native crop size
    int cell_out_h = 0;
};

struct ImageRecord {
    int index = 0;
    std::string input;
    bool ok = false;
    std::string error;
    double rotation_deg = 0.0;
    std::array<double, 9> homography{};
    PatternParam h_vertical;
    PatternParam h_horizontal;
    int cell_count = 0;
};

struct PipelineReport {
    std::vector<ImageRecord> records;
    int failures = 0;
};

int resolve_jobs(int requested);

// Full multi-cell work-flow per input image: rotation correction,
// perspective correction, cell detection, crops and overlay, plus one JSON
// line per image in <out_dir>/results.jsonl. A failing image is recorded and
// skipped; the rest of the batch proceeds. Output bytes are identical for
// identical inputs/config/seed at any parallelism.
PipelineReport run_pipeline(const std::vector<std::string>& inputs,
                            const PipelineConfig& config);

}  // namespace elproc

#endif
