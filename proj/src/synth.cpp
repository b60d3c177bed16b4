#include "elproc/synth.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "elproc/error.hpp"

namespace elproc {

namespace {

constexpr double kBackground = 8.0;
constexpr double kLineValue = 30.0;
constexpr double kCellBase = 165.0;
constexpr double kCellSpread = 30.0;   // per-cell mean variation
constexpr double kMarginValue = 70.0;  // non-cell gaps (frame margins)

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

}  // namespace

SynthModule render_module(const ModuleSpec& spec, const RenderParams& params) {
    spec.validate();
    SynthModule out;
    out.module_w = params.module_w > 0 ? params.module_w
                                       : static_cast<int>(std::lround(0.6 * params.canvas_w));
    out.module_h = params.module_h > 0 ? params.module_h
                                       : static_cast<int>(std::lround(0.6 * params.canvas_h));
    if (out.module_w > params.canvas_w || out.module_h > params.canvas_h)
        throw Error("module does not fit in canvas");

    const GapSpec delta_v = cumulative_deltas(spec.vertical_gaps);
    const GapSpec delta_h = cumulative_deltas(spec.horizontal_gaps);
    const int left = (params.canvas_w - out.module_w) / 2;
    const int top = (params.canvas_h - out.module_h) / 2;

    CellGrid& truth = out.truth;
    for (int l = 0; l < delta_v.line_count(); ++l)
        truth.vertical_lines.push_back(
            left + static_cast<int>(std::lround(delta_v.cumulative[l] * (out.module_w - 1))));
    for (int l = 0; l < delta_h.line_count(); ++l)
        truth.horizontal_lines.push_back(
            top + static_cast<int>(std::lround(delta_h.cumulative[l] * (out.module_h - 1))));
    truth.vertical_detection = {{truth.vertical_lines.front(), truth.vertical_lines.back()}, 0.0};
    truth.horizontal_detection = {
        {truth.horizontal_lines.front(), truth.horizontal_lines.back()}, 0.0};

    std::mt19937_64 rng(params.seed);
    GrayImage img(params.canvas_w, params.canvas_h, kBackground);

    const auto is_cell = [](const std::vector<bool>& mask, size_t gap) {
        return mask.empty() || mask[gap];
    };

    // Cell interiors with a per-cell random mean.
    std::uniform_real_distribution<double> cell_mean(-kCellSpread, kCellSpread);
    for (size_t gy = 0; gy + 1 < truth.horizontal_lines.size(); ++gy) {
        const bool row_cell = is_cell(spec.cell_mask_horizontal, gy);
        std::vector<CellRect> truth_row;
        for (size_t gx = 0; gx + 1 < truth.vertical_lines.size(); ++gx) {
            const bool col_cell = is_cell(spec.cell_mask_vertical, gx);
            const double mean = kCellBase + cell_mean(rng);
            const double value = row_cell && col_cell ? mean : kMarginValue;
            for (int y = truth.horizontal_lines[gy]; y <= truth.horizontal_lines[gy + 1]; ++y)
                for (int x = truth.vertical_lines[gx]; x <= truth.vertical_lines[gx + 1]; ++x)
                    img.at(x, y) = value;
            if (row_cell && col_cell)
                truth_row.push_back({truth.vertical_lines[gx], truth.horizontal_lines[gy],
                                     truth.vertical_lines[gx + 1], truth.horizontal_lines[gy + 1]});
        }
        if (row_cell) truth.cells.push_back(std::move(truth_row));
    }

    // Dark grid lines on top.
    const int lw = std::max(1, params.line_width);
    const int y_lo = truth.horizontal_lines.front(), y_hi = truth.horizontal_lines.back();
    const int x_lo = truth.vertical_lines.front(), x_hi = truth.vertical_lines.back();
    for (int xc : truth.vertical_lines)
        for (int x = xc - (lw - 1) / 2; x <= xc + lw / 2; ++x) {
            if (x < 0 || x >= img.width) continue;
            for (int y = y_lo; y <= y_hi; ++y) img.at(x, y) = kLineValue;
        }
    for (int yc : truth.horizontal_lines)
        for (int y = yc - (lw - 1) / 2; y <= yc + lw / 2; ++y) {
            if (y < 0 || y >= img.height) continue;
            for (int x = x_lo; x <= x_hi; ++x) img.at(x, y) = kLineValue;
        }

    // Contrast scaling about the background, then vignette, then noise.
    if (params.contrast != 1.0)
        for (double& v : img.pixels) v = kBackground + params.contrast * (v - kBackground);
    if (params.vignette > 0.0) {
        const double cx = (img.width - 1) / 2.0, cy = (img.height - 1) / 2.0;
        const double rmax2 = cx * cx + cy * cy;
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x) {
                const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                img.at(x, y) *= 1.0 - params.vignette * r2 / rmax2;
            }
    }
    if (params.noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, params.noise_sigma * 255.0);
        for (double& v : img.pixels) v += noise(rng);
    }
    for (double& v : img.pixels) v = std::clamp(v, 0.0, 255.0);

    out.image = std::move(img);
    return out;
}

Homography distortion_homography(const DistortionParams& theta, int canvas_w,
                                 int canvas_h) {
    const double cx = (canvas_w - 1) / 2.0, cy = (canvas_h - 1) / 2.0;
    const double hw = theta.module_w / 2.0, hh = theta.module_h / 2.0;
    const Quadrangle ref{{cx - hw, cy + hh}, {cx - hw, cy - hh}, {cx + hw, cy - hh},
                         {cx + hw, cy + hh}};
    const auto& o = theta.corner_offsets;
    const Quadrangle displaced{{ref.a.x + o[0], ref.a.y + o[1]},
                               {ref.b.x + o[2], ref.b.y + o[3]},
                               {ref.c.x + o[4], ref.c.y + o[5]},
                               {ref.d.x + o[6], ref.d.y + o[7]}};
    return homography_from_correspondences(ref, displaced);
}

GrayImage apply_distortion(const GrayImage& img, const DistortionParams& theta) {
    GrayImage out = img;
    const bool any_offset =
        std::any_of(theta.corner_offsets.begin(), theta.corner_offsets.end(),
                    [](double v) { return v != 0.0; });
    if (any_offset)
        out = warp_perspective(out, distortion_homography(theta, img.width, img.height));
    if (theta.rotation_deg != 0.0) out = rotate(out, deg2rad(theta.rotation_deg));
    if (theta.shift_x != 0 || theta.shift_y != 0)
        out = torus_shift(out, theta.shift_x, theta.shift_y);
    return out;
}

std::vector<DistortionParams> sample_distortions(int count, const DistortionRanges& ranges,
                                                 uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> rot(-ranges.max_rotation_deg,
                                               ranges.max_rotation_deg);
    const double tilt = std::tan(deg2rad(ranges.max_tilt_deg));
    const double bx = tilt * ranges.module_h / 2.0;  // x offsets tilt vertical edges
    const double by = tilt * ranges.module_w / 2.0;
    std::uniform_real_distribution<double> off_x(-bx, bx);
    std::uniform_real_distribution<double> off_y(-by, by);

    // Worst-case half extents after perspective and rotation bound the shift.
    const double r = deg2rad(ranges.max_rotation_deg);
    const double hw_eff = ranges.module_w / 2.0 + bx;
    const double hh_eff = ranges.module_h / 2.0 + by;
    const double rot_hw = hw_eff * std::cos(r) + hh_eff * std::sin(r);
    const double rot_hh = hw_eff * std::sin(r) + hh_eff * std::cos(r);
    const int bound_x = std::max(
        0, static_cast<int>(std::floor(ranges.canvas_w / 2.0 - rot_hw)) - ranges.shift_pad);
    const int bound_y = std::max(
        0, static_cast<int>(std::floor(ranges.canvas_h / 2.0 - rot_hh)) - ranges.shift_pad);
    std::uniform_int_distribution<int> shift_x(-bound_x, bound_x);
    std::uniform_int_distribution<int> shift_y(-bound_y, bound_y);

    std::vector<DistortionParams> out;
    out.reserve(static_cast<size_t>(std::max(0, count)));
    for (int i = 0; i < count; ++i) {
        DistortionParams theta;
        theta.rotation_deg = rot(rng);
        for (int c = 0; c < 4; ++c) {
            theta.corner_offsets[2 * c] = off_x(rng);
            theta.corner_offsets[2 * c + 1] = off_y(rng);
        }
        theta.shift_x = shift_x(rng);
        theta.shift_y = shift_y(rng);
        theta.module_w = ranges.module_w;
        theta.module_h = ranges.module_h;
        out.push_back(theta);
    }
    return out;
}

namespace {

struct TruthCorners {
    Point ul, ur, ll, lr;
};

TruthCorners truth_corners(const CellGrid& truth) {
    const double x0 = truth.vertical_lines.front(), x1 = truth.vertical_lines.back();
    const double y0 = truth.horizontal_lines.front(), y1 = truth.horizontal_lines.back();
    return {{x0, y0}, {x1, y0}, {x0, y1}, {x1, y1}};
}

Point map_point(const Point& p, const Homography& hd, double rot_rad,
                const DistortionParams& theta, double corr_rot_rad,
                const Homography& corr_h, double cx, double cy) {
    Point q = hd.apply(p);
    auto [rx, ry] = rotate_point_forward(q.x, q.y, rot_rad, cx, cy);
    q = {rx + theta.shift_x, ry + theta.shift_y};
    auto [ux, uy] = rotate_point_forward(q.x, q.y, corr_rot_rad, cx, cy);
    return corr_h.apply({ux, uy});
}

double side_angle_deg(const Point& a, const Point& b, bool vertical) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    return rad2deg(vertical ? std::atan2(std::abs(dx), std::abs(dy))
                            : std::atan2(std::abs(dy), std::abs(dx)));
}

SadReport evaluate_case(const SynthModule& module, const DistortionParams& theta,
                        const ModuleSpec& spec, const SimulationConfig& config) {
    SadReport report;
    report.theta = theta;
    try {
        const GrayImage distorted = apply_distortion(module.image, theta);
        const RotationResult rres = correct_rotation(distorted, config.rotation);
        const PerspectiveResult pres = correct_perspective(rres.corrected, config.perspective);
        const CellGrid grid = detect_cells(pres.corrected, spec, config.cells);

        report.est_rotation_deg = -rad2deg(rres.angle);
        report.rotation_sad_deg = std::abs(theta.rotation_deg - report.est_rotation_deg);

        const double cx = (module.image.width - 1) / 2.0;
        const double cy = (module.image.height - 1) / 2.0;
        const Homography hd =
            distortion_homography(theta, module.image.width, module.image.height);
        const TruthCorners t = truth_corners(module.truth);
        const double rot_rad = deg2rad(theta.rotation_deg);
        const auto mp = [&](const Point& p) {
            return map_point(p, hd, rot_rad, theta, rres.angle, pres.hmat, cx, cy);
        };
        const Point ul = mp(t.ul), ur = mp(t.ur), ll = mp(t.ll), lr = mp(t.lr);

        report.perspective_sad_deg = side_angle_deg(ul, ur, false) +
                                     side_angle_deg(ll, lr, false) +
                                     side_angle_deg(ul, ll, true) +
                                     side_angle_deg(ur, lr, true);

        const double est_x0 = grid.vertical_lines.front();
        const double est_y0 = grid.horizontal_lines.front();
        report.position_sad_px = std::abs(est_x0 - ul.x) + std::abs(est_y0 - ul.y);

        const double est_w = grid.vertical_lines.back() - grid.vertical_lines.front();
        const double est_h = grid.horizontal_lines.back() - grid.horizontal_lines.front();
        const double true_w = 0.5 * ((ur.x - ul.x) + (lr.x - ll.x));
        const double true_h = 0.5 * ((ll.y - ul.y) + (lr.y - ur.y));
        report.size_sad_px = std::abs(est_w - true_w) + std::abs(est_h - true_h);
        report.ok = true;
    } catch (const std::exception& e) {
        report.ok = false;
        report.error = e.what();
    }
    return report;
}

}  // namespace

std::vector<SadReport> evaluate_accuracy(const std::vector<SynthModule>& modules,
                                         const std::vector<DistortionParams>& distortions,
                                         const ModuleSpec& spec,
                                         const SimulationConfig& config) {
    const size_t total = modules.size() * distortions.size();
    std::vector<SadReport> reports(total);
    std::atomic<size_t> next{0};
    const int jobs = std::max(1, config.jobs);

    const auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= total) break;
            const size_t mi = i / distortions.size();
            const size_t di = i % distortions.size();
            reports[i] = evaluate_case(modules[mi], distortions[di], spec, config);
            reports[i].case_index = static_cast<int>(i);
            reports[i].image_index = static_cast<int>(mi);
            reports[i].distortion_index = static_cast<int>(di);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return reports;
}

namespace {

MetricSummary metric_summary(std::vector<double> values) {
    MetricSummary s;
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    const auto quantile = [&](double q) {
        const double pos = q * (values.size() - 1);
        const size_t lo = static_cast<size_t>(std::floor(pos));
        const size_t hi = std::min(lo + 1, values.size() - 1);
        const double f = pos - lo;
        return values[lo] * (1.0 - f) + values[hi] * f;
    };
    s.min = values.front();
    s.q1 = quantile(0.25);
    s.median = quantile(0.5);
    s.q3 = quantile(0.75);
    s.max = values.back();
    return s;
}

}  // namespace

AccuracySummary summarize(const std::vector<SadReport>& reports) {
    AccuracySummary s;
    s.cases = static_cast<int>(reports.size());
    std::vector<double> rot, persp, pos, size;
    for (const auto& r : reports) {
        if (!r.ok) {
            ++s.failures;
            continue;
        }
        rot.push_back(r.rotation_sad_deg);
        persp.push_back(r.perspective_sad_deg);
        pos.push_back(r.position_sad_px);
        size.push_back(r.size_sad_px);
    }
    s.rotation_deg = metric_summary(std::move(rot));
    s.perspective_deg = metric_summary(std::move(persp));
    s.position_px = metric_summary(std::move(pos));
    s.size_px = metric_summary(std::move(size));
    return s;
}

void write_report_csv(const std::vector<SadReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open report for writing: " + path);
    out << "case,image,distortion,status,rotation_true_deg";
    for (int i = 0; i < 8; ++i) out << ",corner_offset_" << i;
    out << ",shift_x,shift_y,module_w,module_h,est_rotation_deg,rotation_sad_deg,"
           "perspective_sad_deg,position_sad_px,size_sad_px,error\n";
    out.precision(10);
    for (const auto& r : reports) {
        out << r.case_index << ',' << r.image_index << ',' << r.distortion_index << ','
            << (r.ok ? "ok" : "failed") << ',' << r.theta.rotation_deg;
        for (double o : r.theta.corner_offsets) out << ',' << o;
        out << ',' << r.theta.shift_x << ',' << r.theta.shift_y << ',' << r.theta.module_w
            << ',' << r.theta.module_h << ',' << r.est_rotation_deg << ','
            << r.rotation_sad_deg << ',' << r.perspective_sad_deg << ','
            << r.position_sad_px << ',' << r.size_sad_px << ',';
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        out << err << '\n';
    }
}

std::string summary_to_json(const AccuracySummary& summary) {
    const auto metric = [](const MetricSummary& m) {
        return nlohmann::json{
            {"min", m.min}, {"q1", m.q1}, {"median", m.median}, {"q3", m.q3}, {"max", m.max}};
    };
    nlohmann::json j{{"cases", summary.cases},
                     {"failures", summary.failures},
                     {"rotation_sad_deg", metric(summary.rotation_deg)},
                     {"perspective_sad_deg", metric(summary.perspective_deg)},
                     {"position_sad_px", metric(summary.position_px)},
                     {"size_sad_px", metric(summary.size_px)}};
    return j.dump(2);
}

}  // namespace elproc
