#include "elproc/hough_lines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace elproc {

double LineSegment::length() const { return std::hypot(x2 - x1, y2 - y1); }

namespace {

constexpr int kNumAngle = 180;  // 1-degree bins over [0, pi)
constexpr int kShift = 16;      // fixed-point fraction bits for corridor walks

struct Walker {
    int64_t x, y, dx, dy;
    bool xflag;
    int width, height;

    bool position(int& px, int& py) const {
        if (xflag) {
            px = static_cast<int>(x);
            py = static_cast<int>(y >> kShift);
        } else {
            px = static_cast<int>(x >> kShift);
            py = static_cast<int>(y);
        }
        return px >= 0 && py >= 0 && px < width && py < height;
    }
    void step() {
        x += dx;
        y += dy;
    }
};

Walker make_walker(int x0, int y0, double a, double b, bool forward, int w, int h) {
    // (a, b) = (-sin t, cos t) points along the line with normal angle t.
    Walker wk{};
    wk.width = w;
    wk.height = h;
    wk.xflag = std::abs(a) > std::abs(b);
    if (wk.xflag) {
        wk.dx = a > 0 ? 1 : -1;
        wk.dy = static_cast<int64_t>(std::llround(b * (1 << kShift) / std::abs(a)));
        wk.x = x0;
        wk.y = (static_cast<int64_t>(y0) << kShift) + (1 << (kShift - 1));
    } else {
        wk.dy = b > 0 ? 1 : -1;
        wk.dx = static_cast<int64_t>(std::llround(a * (1 << kShift) / std::abs(b)));
        wk.x = (static_cast<int64_t>(x0) << kShift) + (1 << (kShift - 1));
        wk.y = y0;
    }
    if (!forward) {
        wk.dx = -wk.dx;
        wk.dy = -wk.dy;
    }
    return wk;
}

}  // namespace

std::vector<LineSegment> hough_line_segments(const BinaryImage& bin,
                                             const HoughParams& params) {
    std::vector<LineSegment> segments;
    auto points = bin.foreground();
    if (points.empty()) return segments;

    const int w = bin.width, h = bin.height;
    const double min_length =
        params.min_length > 0.0 ? params.min_length : 0.2 * std::min(w, h);
    const int diag = static_cast<int>(std::ceil(std::hypot(w, h)));
    const int numrho = 2 * diag + 1;
    const int rho_offset = diag;

    std::vector<double> cos_t(kNumAngle), sin_t(kNumAngle);
    for (int n = 0; n < kNumAngle; ++n) {
        const double theta = n * std::numbers::pi / kNumAngle;
        cos_t[n] = std::cos(theta);
        sin_t[n] = std::sin(theta);
    }

    std::vector<int> accum(static_cast<size_t>(kNumAngle) * numrho, 0);
    std::vector<uint8_t> mask = bin.mask;
    std::vector<uint8_t> voted(mask.size(), 0);
    std::mt19937_64 rng(params.seed);

    auto vote = [&](int x, int y, int delta, int* best_n) {
        int best = -1, best_val = 0;
        for (int n = 0; n < kNumAngle; ++n) {
            const int r = static_cast<int>(std::lround(x * cos_t[n] + y * sin_t[n])) + rho_offset;
            const int val = (accum[static_cast<size_t>(n) * numrho + r] += delta);
            if (best_n && val > best_val) {
                best_val = val;
                best = n;
            }
        }
        if (best_n) *best_n = best;
        return best_val;
    };

    size_t remaining = points.size();
    while (remaining > 0) {
        std::uniform_int_distribution<size_t> pick(0, remaining - 1);
        const size_t idx = pick(rng);
        const auto [x0, y0] = points[idx];
        points[idx] = points[--remaining];
        const size_t flat = static_cast<size_t>(y0) * w + x0;
        if (!mask[flat]) continue;

        int best_n = -1;
        const int best_val = vote(x0, y0, +1, &best_n);
        voted[flat] = 1;
        if (best_val < params.threshold) continue;

        const double a = -sin_t[best_n];
        const double b = cos_t[best_n];
        int ex[2] = {x0, x0}, ey[2] = {y0, y0};
        for (int k = 0; k < 2; ++k) {
            Walker wk = make_walker(x0, y0, a, b, k == 0, w, h);
            double gap = 0.0;
            for (;;) {
                wk.step();
                int px, py;
                if (!wk.position(px, py)) break;
                if (mask[static_cast<size_t>(py) * w + px]) {
                    gap = 0.0;
                    ex[k] = px;
                    ey[k] = py;
                } else if (++gap > params.max_gap) {
                    break;
                }
            }
        }

        const bool good = std::hypot(ex[1] - ex[0], ey[1] - ey[0]) >= min_length;
        // Second walk: consume the corridor plus a small transverse band.
        // The band pixels feed a total-least-squares refit, so segment
        // angles are not quantized to the accumulator's 1-degree bins.
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        std::vector<std::pair<int, int>> support;
        const int band = 2;
        for (int k = 0; k < 2; ++k) {
            Walker wk = make_walker(x0, y0, a, b, k == 0, w, h);
            for (;;) {
                int px, py;
                if (!wk.position(px, py)) break;
                for (int t = -band; t <= band; ++t) {
                    const int qx = wk.xflag ? px : px + t;
                    const int qy = wk.xflag ? py + t : py;
                    if (qx < 0 || qy < 0 || qx >= w || qy >= h) continue;
                    const size_t f = static_cast<size_t>(qy) * w + qx;
                    if (!mask[f]) continue;
                    mask[f] = 0;
                    if (voted[f]) vote(qx, qy, -1, nullptr);
                    if (good) {
                        support.emplace_back(qx, qy);
                        sx += qx;
                        sy += qy;
                        sxx += double(qx) * qx;
                        sxy += double(qx) * qy;
                        syy += double(qy) * qy;
                    }
                }
                if (px == ex[k] && py == ey[k]) break;
                wk.step();
            }
        }
        if (!good) continue;

        LineSegment seg{static_cast<double>(ex[0]), static_cast<double>(ey[0]),
                        static_cast<double>(ex[1]), static_cast<double>(ey[1])};
        if (support.size() >= 2) {
            const double n = static_cast<double>(support.size());
            const double mx = sx / n, my = sy / n;
            const double cxx = sxx / n - mx * mx;
            const double cxy = sxy / n - mx * my;
            const double cyy = syy / n - my * my;
            const double theta = 0.5 * std::atan2(2 * cxy, cxx - cyy);
            const double dx = std::cos(theta), dy = std::sin(theta);
            double tmin = 0, tmax = 0;
            for (const auto& [qx, qy] : support) {
                const double t = (qx - mx) * dx + (qy - my) * dy;
                tmin = std::min(tmin, t);
                tmax = std::max(tmax, t);
            }
            seg = {mx + tmin * dx, my + tmin * dy, mx + tmax * dx, my + tmax * dy};
        }
        if (seg.length() >= min_length) segments.push_back(seg);
    }
    return segments;
}

ClassifiedLines classify_and_filter(const std::vector<LineSegment>& segments,
                                    int width, int height, double max_angle) {
    if (!(max_angle > 0.0) || !(max_angle < std::numbers::pi / 4))
        throw std::invalid_argument("max_angle must be in (0, pi/4)");
    ClassifiedLines out;
    const double xmid = (width - 1) / 2.0;
    const double ymid = (height - 1) / 2.0;
    for (const auto& s : segments) {
        double dx = s.x2 - s.x1, dy = s.y2 - s.y1;
        double x1 = s.x1, y1 = s.y1;
        if (dx == 0.0 && dy == 0.0) continue;
        if (std::abs(dy) >= std::abs(dx)) {
            if (dy < 0) {
                dx = -dx;
                dy = -dy;
            }
            const double angle = std::atan2(-dx, dy);
            if (std::abs(angle) > max_angle) continue;
            const double position = x1 + (ymid - y1) * dx / dy;
            if (position < 0.0 || position > width) continue;
            out.vertical.push_back({Orientation::kVertical, position, angle});
        } else {
            if (dx < 0) {
                dx = -dx;
                dy = -dy;
                x1 = s.x2;
                y1 = s.y2;
            }
            const double angle = std::atan2(dy, dx);
            if (std::abs(angle) > max_angle) continue;
            const double position = y1 + (xmid - x1) * dy / dx;
            if (position < 0.0 || position > height) continue;
            out.horizontal.push_back({Orientation::kHorizontal, position, angle});
        }
    }
    return out;
}

}  // namespace elproc
