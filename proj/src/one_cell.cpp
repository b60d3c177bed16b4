#include "elproc/one_cell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "elproc/error.hpp"

namespace elproc {

ChangePoint cusum(std::span<const double> sequence) {
    const int n = static_cast<int>(sequence.size());
    if (n < 2) throw Error("cusum: need at least 2 samples");

    std::vector<double> sum(n + 1, 0.0), sumsq(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        sum[i + 1] = sum[i] + sequence[i];
        sumsq[i + 1] = sumsq[i] + sequence[i] * sequence[i];
    }

    ChangePoint best;
    best.rss = std::numeric_limits<double>::infinity();
    for (int k = 1; k < n; ++k) {
        const double pre = sumsq[k] - sum[k] * sum[k] / k;
        const double post_sum = sum[n] - sum[k];
        const double post = (sumsq[n] - sumsq[k]) - post_sum * post_sum / (n - k);
        const double rss = pre + post;
        if (rss < best.rss) {
            best.rss = rss;
            best.index = k;
        }
    }
    best.pre_mean = sum[best.index] / best.index;
    best.post_mean = (sum[n] - sum[best.index]) / (n - best.index);
    return best;
}

namespace {

std::vector<double> scan_row(const GrayImage& img, int y, int x_from, int x_to) {
    std::vector<double> seq;
    const int step = x_from <= x_to ? 1 : -1;
    for (int x = x_from;; x += step) {
        seq.push_back(img.at(x, y));
        if (x == x_to) break;
    }
    return seq;
}

std::vector<double> scan_col(const GrayImage& img, int x, int y_from, int y_to) {
    std::vector<double> seq;
    const int step = y_from <= y_to ? 1 : -1;
    for (int y = y_from;; y += step) {
        seq.push_back(img.at(x, y));
        if (y == y_to) break;
    }
    return seq;
}

}  // namespace

PointI detect_corner(const GrayImage& img, PointI seed, Corner corner) {
    if (seed.x < 0 || seed.y < 0 || seed.x >= img.width || seed.y >= img.height)
        throw Error("corner seed outside image");
    const bool left = corner == Corner::kUpperLeft || corner == Corner::kLowerLeft;
    const bool top = corner == Corner::kUpperLeft || corner == Corner::kUpperRight;

    // Scan from the border toward the seed so the change seen is
    // background -> cell; the change-point index maps back to the image
    // coordinate of the first cell pixel.
    const int x_from = left ? 0 : img.width - 1;
    const int y_from = top ? 0 : img.height - 1;
    const auto row = scan_row(img, seed.y, x_from, seed.x);
    const auto col = scan_col(img, seed.x, y_from, seed.y);
    if (row.size() < 2 || col.size() < 2) throw Error("corner scan shorter than 2 samples");

    const int qx = cusum(row).index;
    const int qy = cusum(col).index;
    return {left ? qx : img.width - 1 - qx, top ? qy : img.height - 1 - qy};
}

CornerSeeds CornerSeeds::default_for(int width, int height) {
    const int x0 = width / 4, x1 = (3 * width) / 4;
    const int y0 = height / 4, y1 = (3 * height) / 4;
    return {{x0, y0}, {x1, y0}, {x0, y1}, {x1, y1}};
}

CellQuadrilateral detect_cell_quad(const GrayImage& img, const CornerSeeds& seeds) {
    const PointI ul = detect_corner(img, seeds.upper_left, Corner::kUpperLeft);
    const PointI ur = detect_corner(img, seeds.upper_right, Corner::kUpperRight);
    const PointI ll = detect_corner(img, seeds.lower_left, Corner::kLowerLeft);
    const PointI lr = detect_corner(img, seeds.lower_right, Corner::kLowerRight);
    return {static_cast<double>(ul.x), static_cast<double>(ul.y),
            static_cast<double>(ur.x), static_cast<double>(ur.y),
            static_cast<double>(ll.x), static_cast<double>(ll.y),
            static_cast<double>(lr.x), static_cast<double>(lr.y)};
}

std::pair<double, double> quad_map_point(const CellQuadrilateral& quad, double xs,
                                         double ys) {
    const double x = (1.0 - ys) * quad.x1 + ys * quad.x3 +
                     xs * ((1.0 - ys) * (quad.x2 - quad.x1) + ys * (quad.x4 - quad.x3));
    const double y = (1.0 - xs) * quad.y1 + xs * quad.y2 +
                     ys * ((1.0 - xs) * (quad.y3 - quad.y1) + xs * (quad.y4 - quad.y3));
    return {x, y};
}

GrayImage map_quad_to_rect(const GrayImage& img, const CellQuadrilateral& quad,
                           int out_w, int out_h, bool bilinear) {
    if (out_w < 1 || out_h < 1) throw Error("output size must be positive");
    GrayImage out(out_w, out_h);
    for (int y = 0; y < out_h; ++y) {
        const double ys = static_cast<double>(y) / out_h;
        for (int x = 0; x < out_w; ++x) {
            const double xs = static_cast<double>(x) / out_w;
            const auto [sx, sy] = quad_map_point(quad, xs, ys);
            if (bilinear) {
                if (sx < 0.0 || sy < 0.0 || sx > img.width - 1 || sy > img.height - 1)
                    throw Error("quadrilateral maps outside the image");
                const int x0 = static_cast<int>(std::floor(sx));
                const int y0 = static_cast<int>(std::floor(sy));
                const int x1 = std::min(x0 + 1, img.width - 1);
                const int y1 = std::min(y0 + 1, img.height - 1);
                const double fx = sx - x0;
                const double fy = sy - y0;
                const double t = img.at(x0, y0) * (1 - fx) + img.at(x1, y0) * fx;
                const double b = img.at(x0, y1) * (1 - fx) + img.at(x1, y1) * fx;
                out.at(x, y) = t * (1 - fy) + b * fy;
            } else {
                const int sxi = static_cast<int>(std::floor(sx));
                const int syi = static_cast<int>(std::floor(sy));
                if (sxi < 0 || syi < 0 || sxi >= img.width || syi >= img.height)
                    throw Error("quadrilateral maps outside the image");
                out.at(x, y) = img.at(sxi, syi);
            }
        }
    }
    return out;
}

GrayImage extract_cell(const GrayImage& img, const CornerSeeds& seeds, int out_w,
                       int out_h, bool bilinear) {
    return map_quad_to_rect(img, detect_cell_quad(img, seeds), out_w, out_h, bilinear);
}

}  // namespace elproc
