#include "elproc/image.hpp"

#include <algorithm>
#include <cmath>

namespace elproc {

size_t BinaryImage::count() const {
    size_t n = 0;
    for (uint8_t v : mask) n += v != 0;
    return n;
}

std::vector<std::pair<int, int>> BinaryImage::foreground() const {
    std::vector<std::pair<int, int>> pts;
    pts.reserve(count());
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (get(x, y)) pts.emplace_back(x, y);
    return pts;
}

MeanSd mean_sd(const std::vector<double>& values) {
    MeanSd r;
    if (values.empty()) return r;
    double sum = 0.0;
    for (double v : values) sum += v;
    r.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) {
        const double d = v - r.mean;
        sq += d * d;
    }
    r.sd = std::sqrt(sq / static_cast<double>(values.size()));
    return r;
}

GrayImage standardize(const GrayImage& img) {
    GrayImage out(img.width, img.height);
    const MeanSd ms = mean_sd(img.pixels);
    if (ms.sd == 0.0) return out;  // constant image -> all zeros
    for (size_t i = 0; i < img.pixels.size(); ++i)
        out.pixels[i] = (img.pixels[i] - ms.mean) / ms.sd;
    return out;
}

Projections projections(const GrayImage& img) {
    Projections p;
    p.row_sums.assign(img.height, 0.0);
    p.col_sums.assign(img.width, 0.0);
    for (int y = 0; y < img.height; ++y) {
        double row = 0.0;
        for (int x = 0; x < img.width; ++x) {
            const double v = img.at(x, y);
            row += v;
            p.col_sums[x] += v;
        }
        p.row_sums[y] = row;
    }
    return p;
}

namespace {

// Bilinear sample with zero fill outside the source domain.
double sample_bilinear(const GrayImage& img, double x, double y) {
    if (x < 0.0 || y < 0.0 || x > img.width - 1 || y > img.height - 1) return 0.0;
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
    const double bot = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
    return top * (1.0 - fy) + bot * fy;
}

}  // namespace

GrayImage rotate(const GrayImage& img, double alpha) {
    GrayImage out(img.width, img.height);
    const double cx = (img.width - 1) / 2.0;
    const double cy = (img.height - 1) / 2.0;
    const double c = std::cos(alpha);
    const double s = std::sin(alpha);
    for (int y = 0; y < out.height; ++y) {
        const double dy = y - cy;
        for (int x = 0; x < out.width; ++x) {
            const double dx = x - cx;
            const double sx = cx + c * dx - s * dy;
            const double sy = cy + s * dx + c * dy;
            out.at(x, y) = sample_bilinear(img, sx, sy);
        }
    }
    return out;
}

std::pair<double, double> rotate_point_forward(double x, double y, double alpha,
                                               double cx, double cy) {
    // Inverse of the sampling map used by rotate().
    const double c = std::cos(alpha);
    const double s = std::sin(alpha);
    const double dx = x - cx;
    const double dy = y - cy;
    return {cx + c * dx + s * dy, cy - s * dx + c * dy};
}

GrayImage transpose(const GrayImage& img) {
    GrayImage out(img.height, img.width);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.at(y, x) = img.at(x, y);
    return out;
}

BinaryImage transpose(const BinaryImage& img) {
    BinaryImage out(img.height, img.width);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.set(y, x, img.get(x, y));
    return out;
}

GrayImage downsample(const GrayImage& img, int factor) {
    if (factor <= 1) return img;
    const int ow = (img.width + factor - 1) / factor;
    const int oh = (img.height + factor - 1) / factor;
    GrayImage out(ow, oh);
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            const int x0 = ox * factor;
            const int y0 = oy * factor;
            const int x1 = std::min(x0 + factor, img.width);
            const int y1 = std::min(y0 + factor, img.height);
            double sum = 0.0;
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x) sum += img.at(x, y);
            out.at(ox, oy) = sum / ((x1 - x0) * (y1 - y0));
        }
    }
    return out;
}

GrayImage torus_shift(const GrayImage& img, int dx, int dy) {
    GrayImage out(img.width, img.height);
    const int w = img.width, h = img.height;
    const int mx = ((dx % w) + w) % w;
    const int my = ((dy % h) + h) % h;
    for (int y = 0; y < h; ++y) {
        const int ty = (y + my) % h;
        for (int x = 0; x < w; ++x) out.at((x + mx) % w, ty) = img.at(x, y);
    }
    return out;
}

std::pair<double, double> min_max(const GrayImage& img) {
    if (img.pixels.empty()) return {0.0, 0.0};
    auto [lo, hi] = std::minmax_element(img.pixels.begin(), img.pixels.end());
    return {*lo, *hi};
}

GrayImage rescale(const GrayImage& img, double lo, double hi) {
    GrayImage out(img.width, img.height);
    auto [mn, mx] = min_max(img);
    if (mx == mn) {
        std::fill(out.pixels.begin(), out.pixels.end(), lo);
        return out;
    }
    const double scale = (hi - lo) / (mx - mn);
    for (size_t i = 0; i < img.pixels.size(); ++i)
        out.pixels[i] = lo + (img.pixels[i] - mn) * scale;
    return out;
}

}  // namespace elproc
