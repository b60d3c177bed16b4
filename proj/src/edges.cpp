#include "elproc/edges.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

#include "elproc/error.hpp"

namespace elproc {

BinaryImage usan_edges(const GrayImage& img, const UsanParams& params,
                       Orientation orientation) {
    const int klong = params.kernel_long;
    const int kshort = params.kernel_short;
    if (klong < kshort || kshort < 1 || klong % 2 == 0 || kshort % 2 == 0)
        throw Error("USAN kernel sides must be odd with long >= short >= 1");
    if (params.area_fraction <= 0.0 || params.area_fraction >= 1.0)
        throw Error("USAN area fraction must be in (0, 1)");
    const int wy = orientation == Orientation::kVertical ? klong : kshort;  // window height
    const int wx = orientation == Orientation::kVertical ? kshort : klong;  // window width
    if (wx > img.width || wy > img.height) throw Error("USAN kernel larger than image");

    const int rx = wx / 2;
    const int ry = wy / 2;
    const double t = params.similarity_threshold;
    const double limit = params.area_fraction * (klong * kshort);

    BinaryImage out(img.width, img.height);
    for (int y = ry; y < img.height - ry; ++y) {
        for (int x = rx; x < img.width - rx; ++x) {
            const double center = img.at(x, y);
            int similar = 0;
            for (int v = y - ry; v <= y + ry; ++v)
                for (int u = x - rx; u <= x + rx; ++u)
                    if (std::abs(img.at(u, v) - center) <= t) ++similar;
            out.set(x, y, similar <= limit);
        }
    }
    return out;
}

namespace {

// Separable derivative kernels in the Sobel family: smoothing kernel is the
// binomial row of the aperture, derivative kernel is binomial conv [1,0,-1].
std::vector<double> binomial_row(int n) {
    std::vector<double> row{1.0};
    for (int i = 1; i < n; ++i) {
        std::vector<double> next(row.size() + 1, 0.0);
        for (size_t j = 0; j < row.size(); ++j) {
            next[j] += row[j];
            next[j + 1] += row[j];
        }
        row = std::move(next);
    }
    return row;
}

std::vector<double> derivative_row(int ksize) {
    const std::vector<double> base = binomial_row(ksize - 2);
    std::vector<double> row(base.size() + 2, 0.0);
    for (size_t j = 0; j < base.size(); ++j) {
        row[j] += base[j];       // +1 shifted left
        row[j + 2] -= base[j];   // -1 shifted right
    }
    return row;
}

double replicate_at(const GrayImage& img, int x, int y) {
    x = std::clamp(x, 0, img.width - 1);
    y = std::clamp(y, 0, img.height - 1);
    return img.at(x, y);
}

void separable_filter(const GrayImage& img, const std::vector<double>& kx,
                      const std::vector<double>& ky, GrayImage& out) {
    const int rx = static_cast<int>(kx.size()) / 2;
    const int ry = static_cast<int>(ky.size()) / 2;
    GrayImage tmp(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double s = 0.0;
            for (int i = 0; i < static_cast<int>(kx.size()); ++i)
                s += kx[i] * replicate_at(img, x + i - rx, y);
            tmp.at(x, y) = s;
        }
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double s = 0.0;
            for (int i = 0; i < static_cast<int>(ky.size()); ++i)
                s += ky[i] * tmp.at(x, std::clamp(y + i - ry, 0, img.height - 1));
            out.at(x, y) = s;
        }
}

}  // namespace

BinaryImage canny_edges(const GrayImage& img, const CannyParams& params) {
    if (img.empty()) throw Error("canny: empty image");
    if (params.kernel_size < 3 || params.kernel_size % 2 == 0)
        throw Error("canny: kernel size must be odd and >= 3");
    if (!(params.low_threshold > 0.0) || !(params.low_threshold < params.high_threshold))
        throw Error("canny: thresholds must satisfy 0 < low < high");

    const GrayImage work = rescale(img, 0.0, 255.0);
    const std::vector<double> smooth = binomial_row(params.kernel_size);
    const std::vector<double> deriv = derivative_row(params.kernel_size);
    double smooth_sum = 0.0, deriv_pos = 0.0;
    for (double v : smooth) smooth_sum += v;
    for (double v : deriv)
        if (v > 0.0) deriv_pos += v;
    const double norm = smooth_sum * deriv_pos;  // 4 for aperture 3

    GrayImage gx(work.width, work.height), gy(work.width, work.height);
    separable_filter(work, deriv, smooth, gx);
    separable_filter(work, smooth, deriv, gy);

    GrayImage mag(work.width, work.height);
    for (size_t i = 0; i < mag.pixels.size(); ++i) {
        const double dx = gx.pixels[i] / norm;
        const double dy = gy.pixels[i] / norm;
        mag.pixels[i] = std::hypot(dx, dy);
    }

    constexpr double kTan22 = 0.41421356237309503;  // tan(22.5 deg)
    constexpr double kTan67 = 2.414213562373095;    // tan(67.5 deg)
    const int w = work.width, h = work.height;
    std::vector<uint8_t> state(mag.pixels.size(), 0);  // 0 none, 1 weak, 2 strong
    std::deque<std::pair<int, int>> queue;
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            const double m = mag.at(x, y);
            if (m < params.low_threshold) continue;
            const double dx = gx.at(x, y);
            const double dy = gy.at(x, y);
            const double ax = std::abs(dx), ay = std::abs(dy);
            double before, after;
            if (ay <= ax * kTan22) {
                before = mag.at(x - 1, y);
                after = mag.at(x + 1, y);
            } else if (ay >= ax * kTan67) {
                before = mag.at(x, y - 1);
                after = mag.at(x, y + 1);
            } else if (dx * dy > 0.0) {
                before = mag.at(x - 1, y - 1);
                after = mag.at(x + 1, y + 1);
            } else {
                before = mag.at(x - 1, y + 1);
                after = mag.at(x + 1, y - 1);
            }
            // Asymmetric comparison keeps exactly one pixel of a tied plateau.
            if (m > before && m >= after) {
                const size_t idx = static_cast<size_t>(y) * w + x;
                if (m >= params.high_threshold) {
                    state[idx] = 2;
                    queue.emplace_back(x, y);
                } else {
                    state[idx] = 1;
                }
            }
        }
    }

    BinaryImage out(w, h);
    while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop_front();
        if (out.get(x, y)) continue;
        out.set(x, y, true);
        for (int vy = y - 1; vy <= y + 1; ++vy)
            for (int vx = x - 1; vx <= x + 1; ++vx) {
                if (vx < 0 || vy < 0 || vx >= w || vy >= h) continue;
                const size_t idx = static_cast<size_t>(vy) * w + vx;
                if (state[idx] == 1 && !out.get(vx, vy)) {
                    state[idx] = 2;
                    queue.emplace_back(vx, vy);
                }
            }
    }
    return out;
}

}  // namespace elproc
