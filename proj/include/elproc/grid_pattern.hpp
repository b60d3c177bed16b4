#ifndef ELPROC_GRID_PATTERN_HPP
#define ELPROC_GRID_PATTERN_HPP

#include <vector>

#include "elproc/image.hpp"

namespace elproc {

// Relative spacing of n parallel lines given by the n-1 gaps between them.
// cumulative[l] runs from 0 at the first line to 1 at the last.
struct GapSpec {
    std::vector<double> gaps;
    std::vector<double> cumulative;  // n entries
    std::vector<double> radius_scale;  // d_l = sqrt((1-delta)^2 + delta^2)

    int line_count() const { return static_cast<int>(cumulative.size()); }
};

GapSpec cumulative_deltas(const std::vector<double>& gaps);

// Hough-space point: positions of the first and last line of the pattern.
struct PatternParam {
    int first = 0;
    int last = 0;
};

struct PatternConstraints {
    int min_extent = 1;         // L: minimum last-first distance, px
    int max_extent = 1;         // U: maximum last-first distance, px
    double accuracy_radius = 5.0;  // R
};

// Per-column (or per-row) foreground mass of a binary image.
struct ColumnProfile {
    std::vector<double> weights;

    int size() const { return static_cast<int>(weights.size()); }
    double total() const;
};

enum class ProfileAxis { kX, kY };

ColumnProfile column_profile(const BinaryImage& bin, ProfileAxis axis);

// True when some pattern line of h = (first, last) passes within
// R * d_l of column x:  |first*(1-delta_l) + last*delta_l - x| <= R * d_l.
bool feasible_line_hit(const PatternParam& h, const GapSpec& spec, double x, double radius);

// Sum of profile weights over the columns hit by the pattern.
double pattern_score(const ColumnProfile& profile, const PatternParam& h,
                     const GapSpec& spec, double radius);

struct PatternDetection {
    PatternParam h;
    double score = 0.0;
};

// Exhaustive search over the integer grid {(a, b): 0 <= a < b <= W,
// L <= b - a <= U} maximizing pattern_score. Ties break toward the smallest
// extent, then the smallest first position. Interval prefix sums make each
// candidate O(n), for O(W * U * n) overall.
PatternDetection detect_pattern(const ColumnProfile& profile, const GapSpec& spec,
                                const PatternConstraints& constraints);

}  // namespace elproc

#endif
