#ifndef ELPROC_HOUGH_LINES_HPP
#define ELPROC_HOUGH_LINES_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "elproc/edges.hpp"
#include "elproc/image.hpp"

namespace elproc {

struct LineSegment {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

    double length() const;
};

struct HoughParams {
    int threshold = 50;        // accumulator votes required
    double max_gap = 75.0;     // max gap (px) between points forming a line
    double min_length = 0.0;   // 0 -> 0.2 * min(W, H)
    uint64_t seed = 0x9e3779b97f4a7c15ull;
};

// Progressive probabilistic Hough transform over the foreground pixels:
// 1-pixel rho bins, 1-degree theta bins, random point sampling (seeded),
// corridor tracing with gap tolerance. Deterministic for a fixed seed.
std::vector<LineSegment> hough_line_segments(const BinaryImage& bin,
                                             const HoughParams& params);

// A near-axis line. For vertical lines `position` is the x of the
// intersection with the horizontal midline y = (H-1)/2 and `angle` is the
// signed deviation from the exact vertical; horizontal lines mirror this
// (y at x = (W-1)/2, deviation from horizontal). The sign convention makes
// vertical lines of an image map to horizontal lines of its transpose with
// equal position and negated angle.
struct OrientedLine {
    Orientation orientation = Orientation::kVertical;
    double position = 0.0;
    double angle = 0.0;
};

struct ClassifiedLines {
    std::vector<OrientedLine> vertical;
    std::vector<OrientedLine> horizontal;
};

// Keep segments within max_angle (radians, in (0, pi/4)) of the vertical or
// horizontal axis; drop the rest.
ClassifiedLines classify_and_filter(const std::vector<LineSegment>& segments,
                                    int width, int height, double max_angle);

}  // namespace elproc

#endif
