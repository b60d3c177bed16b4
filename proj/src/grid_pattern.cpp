#include "elproc/grid_pattern.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "elproc/error.hpp"

namespace elproc {

GapSpec cumulative_deltas(const std::vector<double>& gaps) {
    if (gaps.empty()) throw Error("gap list must be nonempty");
    double total = 0.0;
    for (double g : gaps) {
        if (!(g > 0.0)) throw Error("gaps must be positive");
        total += g;
    }
    GapSpec spec;
    spec.gaps = gaps;
    spec.cumulative.resize(gaps.size() + 1);
    spec.cumulative[0] = 0.0;
    double run = 0.0;
    for (size_t l = 0; l < gaps.size(); ++l) {
        run += gaps[l];
        spec.cumulative[l + 1] = run / total;
    }
    spec.cumulative.back() = 1.0;
    spec.radius_scale.resize(spec.cumulative.size());
    for (size_t l = 0; l < spec.cumulative.size(); ++l) {
        const double d = spec.cumulative[l];
        spec.radius_scale[l] = std::sqrt((1.0 - d) * (1.0 - d) + d * d);
    }
    return spec;
}

double ColumnProfile::total() const {
    double t = 0.0;
    for (double w : weights) t += w;
    return t;
}

ColumnProfile column_profile(const BinaryImage& bin, ProfileAxis axis) {
    ColumnProfile profile;
    if (axis == ProfileAxis::kX) {
        profile.weights.assign(bin.width, 0.0);
        for (int y = 0; y < bin.height; ++y)
            for (int x = 0; x < bin.width; ++x)
                if (bin.get(x, y)) profile.weights[x] += 1.0;
    } else {
        profile.weights.assign(bin.height, 0.0);
        for (int y = 0; y < bin.height; ++y)
            for (int x = 0; x < bin.width; ++x)
                if (bin.get(x, y)) profile.weights[y] += 1.0;
    }
    return profile;
}

namespace {

// Single-line form of the hit test. detect_pattern derives its interval
// bounds from this same expression so that both evaluation paths agree
// bit-for-bit.
inline bool line_hit(double a, double b, double delta, double dscale, double x,
                     double radius) {
    return std::abs(a * (1.0 - delta) + b * delta - x) <= radius * dscale;
}

}  // namespace

bool feasible_line_hit(const PatternParam& h, const GapSpec& spec, double x, double radius) {
    const double a = h.first, b = h.last;
    for (size_t l = 0; l < spec.cumulative.size(); ++l)
        if (line_hit(a, b, spec.cumulative[l], spec.radius_scale[l], x, radius)) return true;
    return false;
}

double pattern_score(const ColumnProfile& profile, const PatternParam& h,
                     const GapSpec& spec, double radius) {
    double score = 0.0;
    for (int x = 0; x < profile.size(); ++x)
        if (profile.weights[x] > 0.0 && feasible_line_hit(h, spec, x, radius))
            score += profile.weights[x];
    return score;
}

PatternDetection detect_pattern(const ColumnProfile& profile, const GapSpec& spec,
                                const PatternConstraints& constraints) {
    const int w = profile.size();
    if (w == 0) throw Error("empty profile");
    const int min_ext = constraints.min_extent;
    const int max_ext = constraints.max_extent;
    if (min_ext > max_ext) throw Error("min extent exceeds max extent");
    if (min_ext > w || min_ext < 1) throw Error("no feasible pattern parameters");
    const double radius = constraints.accuracy_radius;

    std::vector<double> prefix(w + 1, 0.0);
    for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + profile.weights[x];

    const int n = spec.line_count();
    std::vector<std::pair<int, int>> intervals(n);

    PatternDetection best;
    best.score = -1.0;

    for (int a = 0; a <= w; ++a) {
        const int b_hi = std::min(w, a + max_ext);
        for (int b = a + min_ext; b <= b_hi; ++b) {
            // Hit columns form one interval per pattern line; bounds come
            // from the shared predicate, nudged to absorb rounding at the
            // edges.
            for (int l = 0; l < n; ++l) {
                const double delta = spec.cumulative[l];
                const double dscale = spec.radius_scale[l];
                const double c = a * (1.0 - delta) + b * delta;
                int lo = static_cast<int>(std::ceil(c - radius * dscale));
                int hi = static_cast<int>(std::floor(c + radius * dscale));
                while (line_hit(a, b, delta, dscale, lo - 1, radius)) --lo;
                while (lo <= hi && !line_hit(a, b, delta, dscale, lo, radius)) ++lo;
                while (line_hit(a, b, delta, dscale, hi + 1, radius)) ++hi;
                while (hi >= lo && !line_hit(a, b, delta, dscale, hi, radius)) --hi;
                intervals[l] = {std::max(lo, 0), std::min(hi, w - 1)};
            }
            std::sort(intervals.begin(), intervals.end());
            double score = 0.0;
            int cur_lo = 0, cur_hi = -1;
            bool open = false;
            for (const auto& [lo, hi] : intervals) {
                if (hi < lo) continue;
                if (!open) {
                    cur_lo = lo;
                    cur_hi = hi;
                    open = true;
                } else if (lo <= cur_hi + 1) {
                    cur_hi = std::max(cur_hi, hi);
                } else {
                    score += prefix[cur_hi + 1] - prefix[cur_lo];
                    cur_lo = lo;
                    cur_hi = hi;
                }
            }
            if (open) score += prefix[cur_hi + 1] - prefix[cur_lo];

            if (score > best.score) {
                best.score = score;
                best.h = {a, b};
            }
            // Equal scores: iteration order already visits smaller extents
            // and smaller a first only per-a, so compare explicitly.
            else if (score == best.score) {
                const int width_new = b - a, width_old = best.h.last - best.h.first;
                if (width_new < width_old ||
                    (width_new == width_old && a < best.h.first)) {
                    best.h = {a, b};
                }
            }
        }
    }
    if (best.score < 0.0) throw Error("no feasible pattern parameters");
    return best;
}

}  // namespace elproc
