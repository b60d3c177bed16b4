#include "elproc/cell_detect.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "elproc/error.hpp"

namespace elproc {

void ModuleSpec::validate() const {
    if (vertical_gaps.empty() || horizontal_gaps.empty())
        throw Error("module spec: gap lists must be nonempty");
    for (double g : vertical_gaps)
        if (!(g > 0.0)) throw Error("module spec: vertical gaps must be positive");
    for (double g : horizontal_gaps)
        if (!(g > 0.0)) throw Error("module spec: horizontal gaps must be positive");
    if (!cell_mask_vertical.empty() && cell_mask_vertical.size() != vertical_gaps.size())
        throw Error("module spec: cell_mask_vertical length must match vertical_gaps");
    if (!cell_mask_horizontal.empty() && cell_mask_horizontal.size() != horizontal_gaps.size())
        throw Error("module spec: cell_mask_horizontal length must match horizontal_gaps");
    if (!(min_width_frac > 0.0) || !(min_width_frac <= max_width_frac) || !(max_width_frac <= 1.0))
        throw Error("module spec: need 0 < min_width_frac <= max_width_frac <= 1");
}

namespace {

std::vector<double> parse_doubles(const std::string& value, const std::string& key) {
    std::vector<double> out;
    std::istringstream in(value);
    double v;
    while (in >> v) out.push_back(v);
    std::string rest;
    if (in.clear(), in >> rest)
        throw Error("module spec: bad numeric list for key '" + key + "'");
    return out;
}

std::vector<bool> parse_mask(const std::string& value, const std::string& key) {
    std::vector<bool> out;
    std::istringstream in(value);
    std::string tok;
    while (in >> tok) {
        if (tok == "1" || tok == "true")
            out.push_back(true);
        else if (tok == "0" || tok == "false")
            out.push_back(false);
        else
            throw Error("module spec: bad mask entry '" + tok + "' for key '" + key + "'");
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

ModuleSpec ModuleSpec::parse(const std::string& text) {
    ModuleSpec spec;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error("module spec: expected 'key = value': " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "name") {
            spec.name = value;
        } else if (key == "vertical_gaps") {
            spec.vertical_gaps = parse_doubles(value, key);
        } else if (key == "horizontal_gaps") {
            spec.horizontal_gaps = parse_doubles(value, key);
        } else if (key == "cell_mask_vertical") {
            spec.cell_mask_vertical = parse_mask(value, key);
        } else if (key == "cell_mask_horizontal") {
            spec.cell_mask_horizontal = parse_mask(value, key);
        } else if (key == "min_width_frac") {
            spec.min_width_frac = std::stod(value);
        } else if (key == "max_width_frac") {
            spec.max_width_frac = std::stod(value);
        } else {
            throw Error("module spec: unknown key '" + key + "'");
        }
    }
    spec.validate();
    return spec;
}

ModuleSpec ModuleSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open module spec: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string ModuleSpec::serialize() const {
    std::ostringstream out;
    out << "name = " << name << "\n";
    const auto write_list = [&out](const char* key, const std::vector<double>& v) {
        out << key << " =";
        for (double g : v) out << " " << g;
        out << "\n";
    };
    const auto write_mask = [&out](const char* key, const std::vector<bool>& v) {
        if (v.empty()) return;
        out << key << " =";
        for (bool b : v) out << " " << (b ? 1 : 0);
        out << "\n";
    };
    write_list("vertical_gaps", vertical_gaps);
    write_list("horizontal_gaps", horizontal_gaps);
    write_mask("cell_mask_vertical", cell_mask_vertical);
    write_mask("cell_mask_horizontal", cell_mask_horizontal);
    out << "min_width_frac = " << min_width_frac << "\n";
    out << "max_width_frac = " << max_width_frac << "\n";
    return out.str();
}

namespace {

std::vector<int> reconstruct_lines(const PatternParam& h, const GapSpec& spec) {
    std::vector<int> lines(spec.line_count());
    for (int l = 0; l < spec.line_count(); ++l)
        lines[l] = static_cast<int>(
            std::lround(h.first + spec.cumulative[l] * (h.last - h.first)));
    return lines;
}

}  // namespace

CellGrid detect_cells(const GrayImage& img, const ModuleSpec& spec,
                      const CellDetectOptions& options) {
    spec.validate();
    const GrayImage std_img = standardize(img);
    const BinaryImage edges = canny_edges(std_img, options.canny);

    const GapSpec delta_v = cumulative_deltas(spec.vertical_gaps);
    const GapSpec delta_h = cumulative_deltas(spec.horizontal_gaps);

    const ColumnProfile prof_x = column_profile(edges, ProfileAxis::kX);
    const ColumnProfile prof_y = column_profile(edges, ProfileAxis::kY);

    PatternConstraints cx;
    cx.min_extent = std::max(1, static_cast<int>(std::lround(spec.min_width_frac * img.width)));
    cx.max_extent = static_cast<int>(std::lround(spec.max_width_frac * img.width));
    cx.accuracy_radius = options.accuracy_radius;
    PatternConstraints cy = cx;
    cy.min_extent = std::max(1, static_cast<int>(std::lround(spec.min_width_frac * img.height)));
    cy.max_extent = static_cast<int>(std::lround(spec.max_width_frac * img.height));

    CellGrid grid;
    grid.vertical_detection = detect_pattern(prof_x, delta_v, cx);
    grid.horizontal_detection = detect_pattern(prof_y, delta_h, cy);

    if (grid.vertical_detection.score < options.score_floor_fraction * prof_x.total())
        throw ModuleNotFound("module not found: vertical pattern score below floor");
    if (grid.horizontal_detection.score < options.score_floor_fraction * prof_y.total())
        throw ModuleNotFound("module not found: horizontal pattern score below floor");

    grid.vertical_lines = reconstruct_lines(grid.vertical_detection.h, delta_v);
    grid.horizontal_lines = reconstruct_lines(grid.horizontal_detection.h, delta_h);

    const auto is_cell = [](const std::vector<bool>& mask, size_t gap) {
        return mask.empty() || mask[gap];
    };
    for (size_t gy = 0; gy + 1 < grid.horizontal_lines.size(); ++gy) {
        if (!is_cell(spec.cell_mask_horizontal, gy)) continue;
        std::vector<CellRect> row;
        for (size_t gx = 0; gx + 1 < grid.vertical_lines.size(); ++gx) {
            if (!is_cell(spec.cell_mask_vertical, gx)) continue;
            CellRect r;
            r.x0 = std::clamp(grid.vertical_lines[gx], 0, img.width);
            r.x1 = std::clamp(grid.vertical_lines[gx + 1], 0, img.width);
            r.y0 = std::clamp(grid.horizontal_lines[gy], 0, img.height);
            r.y1 = std::clamp(grid.horizontal_lines[gy + 1], 0, img.height);
            row.push_back(r);
        }
        grid.cells.push_back(std::move(row));
    }
    return grid;
}

namespace {

GrayImage resize_bilinear(const GrayImage& img, int out_w, int out_h) {
    GrayImage out(out_w, out_h);
    const double sx = out_w > 1 ? static_cast<double>(img.width - 1) / (out_w - 1) : 0.0;
    const double sy = out_h > 1 ? static_cast<double>(img.height - 1) / (out_h - 1) : 0.0;
    for (int y = 0; y < out_h; ++y) {
        const double fy = y * sy;
        const int y0 = static_cast<int>(std::floor(fy));
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < out_w; ++x) {
            const double fx = x * sx;
            const int x0 = static_cast<int>(std::floor(fx));
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = fx - x0;
            const double top = img.at(x0, y0) * (1.0 - wx) + img.at(x1, y0) * wx;
            const double bot = img.at(x0, y1) * (1.0 - wx) + img.at(x1, y1) * wx;
            out.at(x, y) = top * (1.0 - wy) + bot * wy;
        }
    }
    return out;
}

}  // namespace

std::vector<GrayImage> crop_cells(const GrayImage& img, const CellGrid& grid,
                                  int out_w, int out_h) {
    std::vector<GrayImage> crops;
    for (const auto& row : grid.cells) {
        for (const CellRect& r : row) {
            GrayImage crop(r.width(), r.height());
            for (int y = r.y0; y < r.y1; ++y)
                for (int x = r.x0; x < r.x1; ++x) crop.at(x - r.x0, y - r.y0) = img.at(x, y);
            if (out_w > 0 && out_h > 0 && !crop.empty())
                crop = resize_bilinear(crop, out_w, out_h);
            crops.push_back(std::move(crop));
        }
    }
    return crops;
}

GrayImage render_detection_overlay(const GrayImage& img, const CellGrid& grid) {
    GrayImage out = img;
    if (grid.vertical_lines.empty() || grid.horizontal_lines.empty()) return out;
    const double value = min_max(img).second;
    const int y0 = std::clamp(grid.horizontal_lines.front(), 0, img.height - 1);
    const int y1 = std::clamp(grid.horizontal_lines.back(), 0, img.height - 1);
    const int x0 = std::clamp(grid.vertical_lines.front(), 0, img.width - 1);
    const int x1 = std::clamp(grid.vertical_lines.back(), 0, img.width - 1);
    for (int x : grid.vertical_lines) {
        if (x < 0 || x >= img.width) continue;
        for (int y = y0; y <= y1; ++y) out.at(x, y) = value;
    }
    for (int y : grid.horizontal_lines) {
        if (y < 0 || y >= img.height) continue;
        for (int x = x0; x <= x1; ++x) out.at(x, y) = value;
    }
    return out;
}

}  // namespace elproc
