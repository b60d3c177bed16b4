#ifndef ELPROC_EDGES_HPP
#define ELPROC_EDGES_HPP

#include "elproc/image.hpp"

namespace elproc {

enum class Orientation { kVertical, kHorizontal };

// Directionally tuned USAN edge detector. kernel_long x kernel_short window;
// similarity_threshold is on the standardized intensity scale.
struct UsanParams {
    int kernel_long = 5;
    int kernel_short = 3;
    double area_fraction = 0.4;
    double similarity_threshold = 0.5;
};

// A pixel is marked when the number of window pixels u with
// |I(u) - I(center)| <= t is at most area_fraction * window size. The window
// is kernel_long tall and kernel_short wide for Orientation::kVertical, and
// the transpose for kHorizontal. Pixels whose window does not fit inside the
// image stay background.
BinaryImage usan_edges(const GrayImage& img, const UsanParams& params,
                       Orientation orientation);

struct CannyParams {
    double low_threshold = 25.0;
    double high_threshold = 75.0;
    int kernel_size = 3;
};

// Canny edge detection: the image is affinely rescaled to [0, 255], Sobel
// gradients of the given aperture are normalized so an ideal step of
// amplitude A yields gradient magnitude A, then non-maximum suppression,
// double threshold and 8-connected hysteresis are applied.
BinaryImage canny_edges(const GrayImage& img, const CannyParams& params);

}  // namespace elproc

#endif
