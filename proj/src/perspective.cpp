#include "elproc/perspective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "elproc/error.hpp"

namespace elproc {

namespace {

double median(std::vector<double> v) {
    const size_t n = v.size();
    std::sort(v.begin(), v.end());
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SlopeRegression fit_slope_regression(const std::vector<OrientedLine>& lines,
                                     RegressionMethod method) {
    if (lines.size() < 2)
        throw InsufficientLines("insufficient lines: need at least 2, got " +
                                std::to_string(lines.size()));
    SlopeRegression reg;
    reg.method = method;
    reg.support = static_cast<int>(lines.size());

    if (method == RegressionMethod::kOls) {
        double mp = 0.0, ma = 0.0;
        for (const auto& l : lines) {
            mp += l.position;
            ma += l.angle;
        }
        mp /= lines.size();
        ma /= lines.size();
        double num = 0.0, den = 0.0;
        for (const auto& l : lines) {
            num += (l.position - mp) * (l.angle - ma);
            den += (l.position - mp) * (l.position - mp);
        }
        reg.slope = den > 0.0 ? num / den : 0.0;
        reg.intercept = ma - reg.slope * mp;
        return reg;
    }

    std::vector<double> slopes;
    slopes.reserve(lines.size() * (lines.size() - 1) / 2);
    for (size_t i = 0; i < lines.size(); ++i)
        for (size_t j = i + 1; j < lines.size(); ++j) {
            const double dp = lines[j].position - lines[i].position;
            if (dp != 0.0) slopes.push_back((lines[j].angle - lines[i].angle) / dp);
        }
    reg.slope = slopes.empty() ? 0.0 : median(std::move(slopes));
    std::vector<double> residuals;
    residuals.reserve(lines.size());
    for (const auto& l : lines) residuals.push_back(l.angle - reg.slope * l.position);
    reg.intercept = median(std::move(residuals));
    return reg;
}

Point Homography::apply(const Point& p) const {
    const double w = m[6] * p.x + m[7] * p.y + m[8];
    if (w == 0.0) throw Error("homography maps point to infinity");
    return {(m[0] * p.x + m[1] * p.y + m[2]) / w, (m[3] * p.x + m[4] * p.y + m[5]) / w};
}

Homography Homography::inverse() const {
    const auto& a = m;
    std::array<double, 9> inv;
    inv[0] = a[4] * a[8] - a[5] * a[7];
    inv[1] = a[2] * a[7] - a[1] * a[8];
    inv[2] = a[1] * a[5] - a[2] * a[4];
    inv[3] = a[5] * a[6] - a[3] * a[8];
    inv[4] = a[0] * a[8] - a[2] * a[6];
    inv[5] = a[2] * a[3] - a[0] * a[5];
    inv[6] = a[3] * a[7] - a[4] * a[6];
    inv[7] = a[1] * a[6] - a[0] * a[7];
    inv[8] = a[0] * a[4] - a[1] * a[3];
    const double det = a[0] * inv[0] + a[1] * inv[3] + a[2] * inv[6];
    double norm = 0.0;
    for (double v : a) norm = std::max(norm, std::abs(v));
    if (std::abs(det) < 1e-12 * norm * norm * norm)
        throw Error("homography is not invertible");
    Homography out;
    for (int i = 0; i < 9; ++i) out.m[i] = inv[i] / det;
    if (out.m[8] != 0.0) {
        const double s = out.m[8];
        for (double& v : out.m) v /= s;
    }
    return out;
}

namespace {

struct ParamLine {
    Point origin;
    Point dir;
};

Point intersect(const ParamLine& p, const ParamLine& q, double limit) {
    const double denom = p.dir.x * q.dir.y - p.dir.y * q.dir.x;
    const double rx = q.origin.x - p.origin.x;
    const double ry = q.origin.y - p.origin.y;
    if (denom == 0.0) throw DegenerateQuadrangle("degenerate quadrangle: parallel frame lines");
    const double t = (rx * q.dir.y - ry * q.dir.x) / denom;
    const Point pt{p.origin.x + t * p.dir.x, p.origin.y + t * p.dir.y};
    if (std::hypot(pt.x - p.origin.x, pt.y - p.origin.y) > limit)
        throw DegenerateQuadrangle("degenerate quadrangle: intersection beyond limit");
    return pt;
}

}  // namespace

std::pair<Quadrangle, Quadrangle> build_quadrangles(const SlopeRegression& vertical,
                                                    const SlopeRegression& horizontal,
                                                    double half_width, Point center) {
    if (!(half_width > 0.0)) throw std::invalid_argument("frame half-width must be > 0");
    const double s = half_width;
    const Point o = center;
    // Image coordinates: upper = smaller y.
    Quadrangle target{{o.x - s, o.y + s}, {o.x - s, o.y - s}, {o.x + s, o.y - s}, {o.x + s, o.y + s}};

    const Point m{o.x - s, o.y};  // left midpoint
    const Point p{o.x + s, o.y};  // right midpoint
    const Point n{o.x, o.y - s};  // top midpoint
    const Point q{o.x, o.y + s};  // bottom midpoint

    const auto vline = [&](const Point& through) {
        const double a = vertical.angle_at(through.x);
        return ParamLine{through, {-std::sin(a), std::cos(a)}};
    };
    const auto hline = [&](const Point& through) {
        const double a = horizontal.angle_at(through.y);
        return ParamLine{through, {std::cos(a), std::sin(a)}};
    };

    const ParamLine left = vline(m), right = vline(p);
    const ParamLine top = hline(n), bottom = hline(q);

    // ~10 image diagonals for the default quarter-min-dimension frame
    const double limit = 80.0 * s;
    Quadrangle source;
    source.a = intersect(left, bottom, limit);
    source.b = intersect(left, top, limit);
    source.c = intersect(right, top, limit);
    source.d = intersect(right, bottom, limit);
    return {source, target};
}

namespace {

// Gaussian elimination with partial pivoting on an n x (n+1) augmented matrix.
void solve_augmented(std::vector<double>& a, int n, std::vector<double>& out) {
    const int cols = n + 1;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * cols + col]) > std::abs(a[pivot * cols + col])) pivot = r;
        if (std::abs(a[pivot * cols + col]) < 1e-12)
            throw Error("singular system: collinear correspondence points");
        if (pivot != col)
            for (int c = 0; c < cols; ++c) std::swap(a[pivot * cols + c], a[col * cols + c]);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r * cols + col] / a[col * cols + col];
            for (int c = col; c < cols; ++c) a[r * cols + c] -= f * a[col * cols + c];
        }
    }
    out.resize(n);
    for (int r = 0; r < n; ++r) out[r] = a[r * cols + n] / a[r * cols + r];
}

}  // namespace

Homography homography_from_correspondences(const Quadrangle& src, const Quadrangle& dst) {
    const Point s[4] = {src.a, src.b, src.c, src.d};
    const Point d[4] = {dst.a, dst.b, dst.c, dst.d};
    std::vector<double> aug(8 * 9, 0.0);
    for (int i = 0; i < 4; ++i) {
        double* r0 = aug.data() + (2 * i) * 9;
        double* r1 = aug.data() + (2 * i + 1) * 9;
        r0[0] = s[i].x;
        r0[1] = s[i].y;
        r0[2] = 1.0;
        r0[6] = -d[i].x * s[i].x;
        r0[7] = -d[i].x * s[i].y;
        r0[8] = d[i].x;
        r1[3] = s[i].x;
        r1[4] = s[i].y;
        r1[5] = 1.0;
        r1[6] = -d[i].y * s[i].x;
        r1[7] = -d[i].y * s[i].y;
        r1[8] = d[i].y;
    }
    std::vector<double> h;
    solve_augmented(aug, 8, h);
    Homography out;
    for (int i = 0; i < 8; ++i) out.m[i] = h[i];
    out.m[8] = 1.0;
    return out;
}

GrayImage warp_perspective(const GrayImage& img, const Homography& hmat) {
    const Homography inv = hmat.inverse();
    GrayImage out(img.width, img.height);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            const Point src = inv.apply({static_cast<double>(x), static_cast<double>(y)});
            if (src.x < 0.0 || src.y < 0.0 || src.x > img.width - 1 || src.y > img.height - 1)
                continue;
            const int x0 = static_cast<int>(std::floor(src.x));
            const int y0 = static_cast<int>(std::floor(src.y));
            const int x1 = std::min(x0 + 1, img.width - 1);
            const int y1 = std::min(y0 + 1, img.height - 1);
            const double fx = src.x - x0;
            const double fy = src.y - y0;
            const double top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
            const double bot = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
            out.at(x, y) = top * (1.0 - fy) + bot * fy;
        }
    }
    return out;
}

PerspectiveResult correct_perspective(const GrayImage& img, const PerspectiveOptions& options) {
    const GrayImage std_img = standardize(img);
    const BinaryImage edges_v = usan_edges(std_img, options.usan, Orientation::kVertical);
    const BinaryImage edges_h = usan_edges(std_img, options.usan, Orientation::kHorizontal);

    const auto segs_v = hough_line_segments(edges_v, options.hough);
    const auto segs_h = hough_line_segments(edges_h, options.hough);

    const auto lines_v = classify_and_filter(segs_v, img.width, img.height, options.max_angle);
    const auto lines_h = classify_and_filter(segs_h, img.width, img.height, options.max_angle);

    const SlopeRegression vreg = fit_slope_regression(lines_v.vertical, options.regression);
    const SlopeRegression hreg = fit_slope_regression(lines_h.horizontal, options.regression);

    const double s = options.frame_fraction * std::min(img.width, img.height);
    const Point center{(img.width - 1) / 2.0, (img.height - 1) / 2.0};
    const auto [source, target] = build_quadrangles(vreg, hreg, s, center);

    PerspectiveResult result;
    result.hmat = homography_from_correspondences(source, target);
    result.corrected = warp_perspective(img, result.hmat);
    result.vertical_lines = static_cast<int>(lines_v.vertical.size());
    result.horizontal_lines = static_cast<int>(lines_h.horizontal.size());
    return result;
}

}  // namespace elproc
