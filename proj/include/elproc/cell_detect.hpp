#ifndef ELPROC_CELL_DETECT_HPP
#define ELPROC_CELL_DETECT_HPP

#include <string>
#include <vector>

#include "elproc/edges.hpp"
#include "elproc/grid_pattern.hpp"
#include "elproc/image.hpp"

namespace elproc {

// Physical grid description of a PV module: relative gap widths between the
// grid lines of each orientation, plus a mask telling which gaps are cells
// (as opposed to frame margins).
struct ModuleSpec {
    std::string name;
    std::vector<double> vertical_gaps;    // left to right; lines = gaps + 1
    std::vector<double> horizontal_gaps;  // top to bottom
    std::vector<bool> cell_mask_vertical;    // empty -> every gap is a cell
    std::vector<bool> cell_mask_horizontal;
    double min_width_frac = 0.3;
    double max_width_frac = 1.0;

    int vertical_line_count() const { return static_cast<int>(vertical_gaps.size()) + 1; }
    int horizontal_line_count() const { return static_cast<int>(horizontal_gaps.size()) + 1; }

    void validate() const;

    // Plain-text key = value format; see docs/module-spec-format.md.
    static ModuleSpec parse(const std::string& text);
    static ModuleSpec load(const std::string& path);
    std::string serialize() const;
};

struct CellRect {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open [x0, x1) x [y0, y1)

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
};

struct CellGrid {
    std::vector<int> vertical_lines;    // ascending x positions
    std::vector<int> horizontal_lines;  // ascending y positions
    std::vector<std::vector<CellRect>> cells;  // [row][col], masked gaps only
    PatternDetection vertical_detection;
    PatternDetection horizontal_detection;

    int rows() const { return static_cast<int>(cells.size()); }
    int cols() const { return cells.empty() ? 0 : static_cast<int>(cells.front().size()); }
};

struct CellDetectOptions {
    CannyParams canny;
    double accuracy_radius = 5.0;  // R
    double score_floor_fraction = 0.10;  // of total profile mass, per axis
};

// Detect all grid lines of a rotation- and perspective-corrected image and
// derive the cell rectangles: standardize, Canny edges, column profiles,
// constrained pattern Hough per axis, line reconstruction.
CellGrid detect_cells(const GrayImage& img, const ModuleSpec& spec,
                      const CellDetectOptions& options = {});

// One crop per cell in row-major order. out_w/out_h of 0 keeps the native
// rectangle (exact pixel copy); otherwise crops are bilinearly resampled.
std::vector<GrayImage> crop_cells(const GrayImage& img, const CellGrid& grid,
                                  int out_w = 0, int out_h = 0);

// Copy of the image with the detected grid drawn at maximum intensity.
GrayImage render_detection_overlay(const GrayImage& img, const CellGrid& grid);

}  // namespace elproc

#endif
