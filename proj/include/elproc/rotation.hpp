#ifndef ELPROC_ROTATION_HPP
#define ELPROC_ROTATION_HPP

#include <functional>

#include "elproc/image.hpp"

namespace elproc {

// Called once per golden-section iteration with the current bracket
// [a, b] and the two interior probes. Used by diagnostics and tests.
using GoldenTrace = std::function<void(double a, double c, double d, double b)>;

// Maximize a unimodal function on [a, b] by golden-section search to
// bracket width eps. One new function evaluation per iteration after the
// initial two probes.
double golden_section_maximize(const std::function<double(double)>& fn, double a,
                               double b, double eps,
                               const GoldenTrace& trace = nullptr);

// sd(row sums) + sd(col sums) of the image rotated by alpha.
double rotation_objective(const GrayImage& img, double alpha);

struct RotationOptions {
    double eps = 0.05 * 3.14159265358979323846 / 180.0;  // 0.05 degrees
    int coarse_steps = 46;  // 0 -> pure golden-section over the full interval
    int downsample = 4;     // objective evaluated on a block-averaged image
};

struct RotationResult {
    double angle = 0.0;       // radians applied to produce `corrected`
    double objective = 0.0;   // objective value at `angle` (working scale)
    bool degenerate = false;  // constant input, no correction possible
    GrayImage corrected;
};

// Rotation-distortion correction: maximize the projection-variance objective
// over [-pi/4, pi/4] with a coarse grid followed by golden-section
// refinement, then rotate the full-resolution input by the optimum.
RotationResult correct_rotation(const GrayImage& img,
                                const RotationOptions& options = {});

}  // namespace elproc

#endif
