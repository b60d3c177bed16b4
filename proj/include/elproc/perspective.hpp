#ifndef ELPROC_PERSPECTIVE_HPP
#define ELPROC_PERSPECTIVE_HPP

#include <array>
#include <vector>

#include "elproc/edges.hpp"
#include "elproc/hough_lines.hpp"
#include "elproc/image.hpp"

namespace elproc {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class RegressionMethod { kOls, kTheilSen };

// angle = intercept + slope * position, fitted over the detected lines of
// one orientation.
struct SlopeRegression {
    double intercept = 0.0;
    double slope = 0.0;
    RegressionMethod method = RegressionMethod::kTheilSen;
    int support = 0;

    double angle_at(double position) const { return intercept + slope * position; }
};

SlopeRegression fit_slope_regression(const std::vector<OrientedLine>& lines,
                                     RegressionMethod method);

// Corners ordered A (lower left), B (upper left), C (upper right),
// D (lower right), in image coordinates (y grows downward).
struct Quadrangle {
    Point a, b, c, d;
};

struct Homography {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};  // row-major 3x3

    static Homography identity() { return {}; }
    Point apply(const Point& p) const;
    Homography inverse() const;
};

std::pair<Quadrangle, Quadrangle> build_quadrangles(const SlopeRegression& vertical,
                                                    const SlopeRegression& horizontal,
                                                    double half_width, Point center);

Homography homography_from_correspondences(const Quadrangle& src, const Quadrangle& dst);

// Inverse-mapped bilinear warp; output has the input dimensions, samples
// outside the source fill with 0.
GrayImage warp_perspective(const GrayImage& img, const Homography& hmat);

struct PerspectiveOptions {
    UsanParams usan;
    HoughParams hough;
    double max_angle = 10.0 * 3.14159265358979323846 / 180.0;
    RegressionMethod regression = RegressionMethod::kTheilSen;
    double frame_fraction = 0.25;  // half-width of the M/N/P/Q frame, rel. min(W, H)
};

struct PerspectiveResult {
    GrayImage corrected;
    Homography hmat;
    int vertical_lines = 0;
    int horizontal_lines = 0;
};

// Full perspective correction: standardize, directional USAN edges, Hough
// lines, slope filtering, slope regressions, quadrangle construction,
// homography estimation and warp.
PerspectiveResult correct_perspective(const GrayImage& img,
                                      const PerspectiveOptions& options = {});

}  // namespace elproc

#endif
