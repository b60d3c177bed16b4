#include "elproc/rotation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace elproc {

double golden_section_maximize(const std::function<double(double)>& fn, double a,
                               double b, double eps, const GoldenTrace& trace) {
    if (!(a < b)) throw std::invalid_argument("golden section: requires a < b");
    if (!(eps > 0.0)) throw std::invalid_argument("golden section: requires eps > 0");
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;  // ~0.618
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = fn(c);
    double fd = fn(d);
    if (trace) trace(a, c, d, b);
    while (b - a > eps) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = fn(d);
        }
        if (trace) trace(a, c, d, b);
    }
    return fc > fd ? c : d;
}

double rotation_objective(const GrayImage& img, double alpha) {
    const Projections p = projections(rotate(img, alpha));
    return mean_sd(p.row_sums).sd + mean_sd(p.col_sums).sd;
}

RotationResult correct_rotation(const GrayImage& img, const RotationOptions& options) {
    if (!(options.eps > 0.0)) throw std::invalid_argument("correct_rotation: eps must be > 0");
    constexpr double kHalfRange = std::numbers::pi / 4;

    RotationResult result;
    const MeanSd ms = mean_sd(img.pixels);
    if (ms.sd == 0.0) {
        result.degenerate = true;
        result.corrected = img;
        return result;
    }

    // The objective only compares angles against each other, so it runs on a
    // standardized, block-averaged copy; the final rotation is applied at
    // full resolution.
    const GrayImage work = standardize(
        options.downsample > 1 ? downsample(img, options.downsample) : img);
    const auto objective = [&work](double alpha) { return rotation_objective(work, alpha); };

    double lo = -kHalfRange, hi = kHalfRange;
    if (options.coarse_steps > 2) {
        const int n = options.coarse_steps;
        const double step = 2 * kHalfRange / (n - 1);
        int best = 0;
        double best_val = -1.0;
        for (int i = 0; i < n; ++i) {
            const double v = objective(-kHalfRange + i * step);
            if (v > best_val) {
                best_val = v;
                best = i;
            }
        }
        lo = -kHalfRange + std::max(0, best - 1) * step;
        hi = -kHalfRange + std::min(n - 1, best + 1) * step;
    }
    result.angle = golden_section_maximize(objective, lo, hi, options.eps);
    result.objective = objective(result.angle);
    result.corrected = rotate(img, result.angle);
    return result;
}

}  // namespace elproc
