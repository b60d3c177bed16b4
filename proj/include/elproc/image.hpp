#ifndef ELPROC_IMAGE_HPP
#define ELPROC_IMAGE_HPP

#include <cstdint>
#include <utility>
#include <vector>

namespace elproc {

// Grayscale image with real-valued pixels, stored row-major.
// Coordinates are 0-based throughout the library: x is the column in
// [0, width), y is the row in [0, height).
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

    double& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }

    bool empty() const { return width <= 0 || height <= 0; }
    size_t size() const { return pixels.size(); }

    bool operator==(const GrayImage& other) const = default;
};

// Binary image: a set of foreground pixel coordinates over the same 0-based
// domain as GrayImage. Stored as a dense 0/1 mask.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> mask;

    BinaryImage() = default;
    BinaryImage(int w, int h)
        : width(w), height(h), mask(static_cast<size_t>(w) * h, 0) {}

    bool get(int x, int y) const { return mask[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { mask[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }

    size_t count() const;
    std::vector<std::pair<int, int>> foreground() const;

    bool operator==(const BinaryImage& other) const = default;
};

// Row and column sums of an image: row_sums has one entry per row (length H),
// col_sums one per column (length W).
struct Projections {
    std::vector<double> row_sums;
    std::vector<double> col_sums;
};

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;  // population sd (divisor n)
};

MeanSd mean_sd(const std::vector<double>& values);

// Subtract mean, divide by population standard deviation. A constant image
// maps to all zeros.
GrayImage standardize(const GrayImage& img);

Projections projections(const GrayImage& img);

// Rotate the image content by `alpha` radians around the image center
// ((W-1)/2, (H-1)/2) using inverse-mapped bilinear sampling. Output has the
// input dimensions; samples falling outside the source are filled with 0.
GrayImage rotate(const GrayImage& img, double alpha);

// Forward map of a source-image point under rotate(): the position in the
// output image where content at (x, y) lands.
std::pair<double, double> rotate_point_forward(double x, double y, double alpha,
                                               double cx, double cy);

GrayImage transpose(const GrayImage& img);
BinaryImage transpose(const BinaryImage& img);

// Block-average downsampling by an integer factor; trailing partial blocks
// average over the pixels present.
GrayImage downsample(const GrayImage& img, int factor);

// Circular shift: content at (x, y) moves to ((x+dx) mod W, (y+dy) mod H).
GrayImage torus_shift(const GrayImage& img, int dx, int dy);

std::pair<double, double> min_max(const GrayImage& img);

// Affine rescale of pixel values to [lo, hi]; constant images map to lo.
GrayImage rescale(const GrayImage& img, double lo, double hi);

}  // namespace elproc

#endif
