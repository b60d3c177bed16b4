#ifndef ELPROC_ONE_CELL_HPP
#define ELPROC_ONE_CELL_HPP

#include <span>
#include <utility>

#include "elproc/image.hpp"

namespace elproc {

// Least-squares change-point estimate for a mean shift: index is the first
// post-change sample, chosen as the argmin over k in {1, .., n-1} of
// RSS(k) = sum_{i<k} (X_i - mean(X_0..X_{k-1}))^2
//        + sum_{i>=k} (X_i - mean(X_k..X_{n-1}))^2,
// ties broken toward the smallest k.
struct ChangePoint {
    int index = 0;
    double rss = 0.0;
    double pre_mean = 0.0;
    double post_mean = 0.0;
};

ChangePoint cusum(std::span<const double> sequence);

enum class Corner { kUpperLeft, kUpperRight, kLowerLeft, kLowerRight };

struct PointI {
    int x = 0;
    int y = 0;
};

// Locate one cell corner from a seed point inside the cell: scan a row and a
// column from the respective image borders toward the seed and take the
// CUSUM change-points as the corner coordinates.
PointI detect_corner(const GrayImage& img, PointI seed, Corner corner);

// Four seeds strictly inside the cell, one near each corner.
struct CornerSeeds {
    PointI upper_left, upper_right, lower_left, lower_right;

    // Seeds at 25% / 75% of the image dimensions.
    static CornerSeeds default_for(int width, int height);
};

// Cell corners ordered upper left, upper right, lower left, lower right.
struct CellQuadrilateral {
    double x1 = 0, y1 = 0;  // upper left
    double x2 = 0, y2 = 0;  // upper right
    double x3 = 0, y3 = 0;  // lower left
    double x4 = 0, y4 = 0;  // lower right
};

CellQuadrilateral detect_cell_quad(const GrayImage& img, const CornerSeeds& seeds);

// The bilinear quadrilateral-to-rectangle map evaluated at normalized output
// coordinates (xs, ys) in [0, 1]; returns the source position before the
// floor is taken.
std::pair<double, double> quad_map_point(const CellQuadrilateral& quad, double xs,
                                         double ys);

// Resample the quadrilateral onto an out_w x out_h rectangle. Default
// sampling floors the mapped source coordinates (nearest lower pixel);
// `bilinear` interpolates instead.
GrayImage map_quad_to_rect(const GrayImage& img, const CellQuadrilateral& quad,
                           int out_w, int out_h, bool bilinear = false);

// Corner detection followed by quadrilateral-to-rectangle standardization.
GrayImage extract_cell(const GrayImage& img, const CornerSeeds& seeds, int out_w,
                       int out_h, bool bilinear = false);

}  // namespace elproc

#endif
