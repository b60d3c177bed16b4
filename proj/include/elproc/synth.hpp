#ifndef ELPROC_SYNTH_HPP
#define ELPROC_SYNTH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "elproc/cell_detect.hpp"
#include "elproc/image.hpp"
#include "elproc/perspective.hpp"
#include "elproc/rotation.hpp"

namespace elproc {

struct RenderParams {
    int canvas_w = 1024;
    int canvas_h = 768;
    int module_w = 0;  // 0 -> 60% of canvas width
    int module_h = 0;
    double contrast = 1.0;      // scales cell/background separation
    double noise_sigma = 0.0;   // additive Gaussian noise, fraction of 255
    double vignette = 0.0;      // radial darkening strength at the corners
    int line_width = 1;         // grid line thickness, px
    uint64_t seed = 1;
};

struct SynthModule {
    GrayImage image;
    CellGrid truth;
    int module_w = 0;
    int module_h = 0;
};

// Render a synthetic EL module: bright cells with per-cell random mean, dark
// grid lines at the spec's relative positions, optional noise and vignette.
// Deterministic per seed.
SynthModule render_module(const ModuleSpec& spec, const RenderParams& params);

// Ground-truth distortion parameters: rotation angle, displacements of the
// four module corners (A lower left, B upper left, C upper right, D lower
// right; x,y pairs) driving the perspective warp, and an integer torus shift.
struct DistortionParams {
    double rotation_deg = 0.0;
    std::array<double, 8> corner_offsets{};
    int shift_x = 0;
    int shift_y = 0;
    int module_w = 0;
    int module_h = 0;
};

// Homography displacing the centered module rectangle corners by theta's
// offsets (the distortion applied by apply_distortion).
Homography distortion_homography(const DistortionParams& theta, int canvas_w,
                                 int canvas_h);

// Apply perspective warp, then rotation, then torus shift. Stages with
// identity parameters are skipped, so an all-zero theta is a bit-exact no-op.
GrayImage apply_distortion(const GrayImage& img, const DistortionParams& theta);

struct DistortionRanges {
    double max_rotation_deg = 20.0;
    double max_tilt_deg = 5.0;  // boundary-line tilt cap for the perspective draw
    int canvas_w = 1024;
    int canvas_h = 768;
    int module_w = 614;
    int module_h = 460;
    int shift_pad = 8;  // safety margin kept between module and canvas border
};

// Uniform draws: rotation in [-max_rotation_deg, max_rotation_deg], corner
// offsets in the box that caps boundary tilts at max_tilt_deg, shifts in the
// range that keeps the distorted module inside the canvas. Deterministic per
// seed.
std::vector<DistortionParams> sample_distortions(int count, const DistortionRanges& ranges,
                                                 uint64_t seed);

struct SimulationConfig {
    RotationOptions rotation;
    PerspectiveOptions perspective;
    CellDetectOptions cells;
    int jobs = 1;
};

// Per-case accuracy: Manhattan distances between the true distortion
// parameters and the estimates recovered by the correction pipeline.
struct SadReport {
    int case_index = 0;
    int image_index = 0;
    int distortion_index = 0;
    bool ok = false;
    std::string error;
    DistortionParams theta;
    double est_rotation_deg = 0.0;
    double rotation_sad_deg = 0.0;
    double perspective_sad_deg = 0.0;  // sum over the four boundary angles
    double position_sad_px = 0.0;      // |dx| + |dy| of the top-left corner
    double size_sad_px = 0.0;          // |dw| + |dh|
};

struct MetricSummary {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

struct AccuracySummary {
    int cases = 0;
    int failures = 0;
    MetricSummary rotation_deg, perspective_deg, position_px, size_px;
};

// Distort every (module, distortion) pair, run the full correction pipeline
// (rotation -> perspective -> cell detection) and report per-case SADs.
// Case order is the row-major cross product; results do not depend on jobs.
std::vector<SadReport> evaluate_accuracy(const std::vector<SynthModule>& modules,
                                         const std::vector<DistortionParams>& distortions,
                                         const ModuleSpec& spec,
                                         const SimulationConfig& config);

AccuracySummary summarize(const std::vector<SadReport>& reports);

void write_report_csv(const std::vector<SadReport>& reports, const std::string& path);
std::string summary_to_json(const AccuracySummary& summary);

}  // namespace elproc

#endif
