#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "elproc/cell_detect.hpp"
#include "elproc/edges.hpp"
#include "elproc/grid_pattern.hpp"
#include "elproc/hough_lines.hpp"
#include "elproc/image.hpp"
#include "elproc/image_io.hpp"
#include "elproc/one_cell.hpp"
#include "elproc/perspective.hpp"
#include "elproc/rotation.hpp"
#include "elproc/synth.hpp"

namespace py = pybind11;

namespace {

elproc::GrayImage image_from_array(const py::array_t<double, py::array::c_style |
                                                                 py::array::forcecast>& arr) {
    if (arr.ndim() != 2) throw py::value_error("expected a 2-D array (H, W)");
    elproc::GrayImage img(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)));
    std::copy(arr.data(), arr.data() + arr.size(), img.pixels.begin());
    return img;
}

py::array_t<double> array_from_image(const elproc::GrayImage& img) {
    py::array_t<double> arr({img.height, img.width});
    std::copy(img.pixels.begin(), img.pixels.end(), arr.mutable_data());
    return arr;
}

py::array_t<uint8_t> array_from_binary(const elproc::BinaryImage& img) {
    py::array_t<uint8_t> arr({img.height, img.width});
    std::copy(img.mask.begin(), img.mask.end(), arr.mutable_data());
    return arr;
}

elproc::BinaryImage binary_from_array(
    const py::array_t<uint8_t, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2) throw py::value_error("expected a 2-D array (H, W)");
    elproc::BinaryImage img(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)));
    for (py::ssize_t i = 0; i < arr.size(); ++i) img.mask[i] = arr.data()[i] ? 1 : 0;
    return img;
}

elproc::ModuleSpec spec_from_obj(const py::object& spec) {
    if (py::isinstance<py::str>(spec)) return elproc::ModuleSpec::parse(spec.cast<std::string>());
    return spec.cast<elproc::ModuleSpec>();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "EL image preprocessing: rotation/perspective correction, grid-pattern "
              "Hough cell detection, CUSUM one-cell extraction";

    py::register_exception<elproc::Error>(m, "ElprocError", PyExc_RuntimeError);

    py::class_<elproc::ModuleSpec>(m, "ModuleSpec")
        .def(py::init<>())
        .def_readwrite("name", &elproc::ModuleSpec::name)
        .def_readwrite("vertical_gaps", &elproc::ModuleSpec::vertical_gaps)
        .def_readwrite("horizontal_gaps", &elproc::ModuleSpec::horizontal_gaps)
        .def_readwrite("cell_mask_vertical", &elproc::ModuleSpec::cell_mask_vertical)
        .def_readwrite("cell_mask_horizontal", &elproc::ModuleSpec::cell_mask_horizontal)
        .def_readwrite("min_width_frac", &elproc::ModuleSpec::min_width_frac)
        .def_readwrite("max_width_frac", &elproc::ModuleSpec::max_width_frac)
        .def_static("parse", &elproc::ModuleSpec::parse, py::arg("text"))
        .def_static("load", &elproc::ModuleSpec::load, py::arg("path"))
        .def("serialize", &elproc::ModuleSpec::serialize);

    m.def("load_image",
          [](const std::string& path) { return array_from_image(elproc::load_image(path)); },
          py::arg("path"));
    m.def("save_image",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
             const std::string& path, int bit_depth) {
              elproc::save_image(image_from_array(img), path, elproc::ImageFormat::kAuto,
                                 bit_depth);
          },
          py::arg("image"), py::arg("path"), py::arg("bit_depth") = 8);

    m.def("standardize", [](const py::array_t<double, py::array::c_style |
                                                          py::array::forcecast>& img) {
        return array_from_image(elproc::standardize(image_from_array(img)));
    });
    m.def("rotate",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
             double alpha) { return array_from_image(elproc::rotate(image_from_array(img), alpha)); },
          py::arg("image"), py::arg("alpha"));
    m.def("projections", [](const py::array_t<double, py::array::c_style |
                                                          py::array::forcecast>& img) {
        const elproc::Projections p = elproc::projections(image_from_array(img));
        return py::make_tuple(p.row_sums, p.col_sums);
    });

    m.def("usan_edges",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
             int kernel_long, int kernel_short, double area_fraction, double threshold,
             const std::string& orientation) {
              const auto orient = orientation == "horizontal" ? elproc::Orientation::kHorizontal
                                                              : elproc::Orientation::kVertical;
              return array_from_binary(elproc::usan_edges(
                  image_from_array(img),
                  {kernel_long, kernel_short, area_fraction, threshold}, orient));
          },
          py::arg("image"), py::arg("kernel_long") = 5, py::arg("kernel_short") = 3,
          py::arg("area_fraction") = 0.4, py::arg("threshold") = 0.5,
          py::arg("orientation") = "vertical");
    m.def("canny_edges",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
             double low, double high, int kernel_size) {
              return array_from_binary(
                  elproc::canny_edges(image_from_array(img), {low, high, kernel_size}));
          },
          py::arg("image"), py::arg("low") = 25.0, py::arg("high") = 75.0,
          py::arg("kernel_size") = 3);

    m.def("golden_section_maximize",
          [](const std::function<double(double)>& fn, double a, double b, double eps) {
              return elproc::golden_section_maximize(fn, a, b, eps);
          },
          py::arg("fn"), py::arg("a"), py::arg("b"), py::arg("eps") = 1e-6);
    m.def("rotation_objective",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
             double alpha) { return elproc::rotation_objective(image_from_array(img), alpha); },
          py::arg("image"), py::arg("alpha"));
    m.def("correct_rotation",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
             double eps_deg, int coarse_steps, int downsample) {
              elproc::RotationOptions opt;
              opt.eps = eps_deg * 3.14159265358979323846 / 180.0;
              opt.coarse_steps = coarse_steps;
              opt.downsample = downsample;
              const elproc::RotationResult res =
                  elproc::correct_rotation(image_from_array(img), opt);
              return py::make_tuple(res.angle, array_from_image(res.corrected), res.degenerate);
          },
          py::arg("image"), py::arg("eps_deg") = 0.05, py::arg("coarse_steps") = 46,
          py::arg("downsample") = 4);

    m.def("correct_perspective",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
             const std::string& regression) {
              elproc::PerspectiveOptions opt;
              opt.regression = regression == "ols" ? elproc::RegressionMethod::kOls
                                                   : elproc::RegressionMethod::kTheilSen;
              const elproc::PerspectiveResult res =
                  elproc::correct_perspective(image_from_array(img), opt);
              return py::make_tuple(array_from_image(res.corrected),
                                    std::vector<double>(res.hmat.m.begin(), res.hmat.m.end()));
          },
          py::arg("image"), py::arg("regression") = "theilsen");

    m.def("hough_line_segments",
          [](const py::array_t<uint8_t, py::array::c_style | py::array::forcecast>& mask,
             int threshold, double max_gap, double min_length, uint64_t seed) {
              elproc::HoughParams params;
              params.threshold = threshold;
              params.max_gap = max_gap;
              params.min_length = min_length;
              params.seed = seed;
              std::vector<std::array<double, 4>> out;
              for (const auto& s : elproc::hough_line_segments(binary_from_array(mask), params))
                  out.push_back({s.x1, s.y1, s.x2, s.y2});
              return out;
          },
          py::arg("mask"), py::arg("threshold") = 50, py::arg("max_gap") = 75.0,
          py::arg("min_length") = 0.0, py::arg("seed") = 0x9e3779b97f4a7c15ull);

    m.def("cumulative_deltas", [](const std::vector<double>& gaps) {
        return elproc::cumulative_deltas(gaps).cumulative;
    });
    m.def("detect_pattern",
          [](const std::vector<double>& weights, const std::vector<double>& gaps,
             int min_extent, int max_extent, double radius) {
              elproc::ColumnProfile profile;
              profile.weights = weights;
              const elproc::PatternDetection det = elproc::detect_pattern(
                  profile, elproc::cumulative_deltas(gaps), {min_extent, max_extent, radius});
              return py::make_tuple(det.h.first, det.h.last, det.score);
          },
          py::arg("weights"), py::arg("gaps"), py::arg("min_extent"), py::arg("max_extent"),
          py::arg("radius") = 5.0);

    m.def("detect_cells",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
             const py::object& spec, double radius) {
              elproc::CellDetectOptions opt;
              opt.accuracy_radius = radius;
              const elproc::CellGrid grid =
                  elproc::detect_cells(image_from_array(img), spec_from_obj(spec), opt);
              std::vector<std::array<int, 4>> rects;
              for (const auto& row : grid.cells)
                  for (const auto& r : row) rects.push_back({r.x0, r.y0, r.x1, r.y1});
              return py::make_tuple(grid.vertical_lines, grid.horizontal_lines, rects);
          },
          py::arg("image"), py::arg("spec"), py::arg("radius") = 5.0);

    m.def("cusum", [](const std::vector<double>& seq) {
        const elproc::ChangePoint cp = elproc::cusum(seq);
        return py::make_tuple(cp.index, cp.rss, cp.pre_mean, cp.post_mean);
    });
    m.def("extract_cell",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
             const std::vector<int>& seeds, int out_w, int out_h, bool bilinear) {
              const elproc::GrayImage gray = image_from_array(img);
              elproc::CornerSeeds s = elproc::CornerSeeds::default_for(gray.width, gray.height);
              if (!seeds.empty()) {
                  if (seeds.size() != 8)
                      throw py::value_error("seeds must hold 8 integers (ul,ur,ll,lr x/y)");
                  s = {{seeds[0], seeds[1]}, {seeds[2], seeds[3]},
                       {seeds[4], seeds[5]}, {seeds[6], seeds[7]}};
              }
              return array_from_image(elproc::extract_cell(gray, s, out_w, out_h, bilinear));
          },
          py::arg("image"), py::arg("seeds") = std::vector<int>{}, py::arg("out_w"),
          py::arg("out_h"), py::arg("bilinear") = false);

    m.def("render_module",
          [](const py::object& spec, int canvas_w, int canvas_h, double contrast,
             double noise_sigma, double vignette, uint64_t seed) {
              elproc::RenderParams params;
              params.canvas_w = canvas_w;
              params.canvas_h = canvas_h;
              params.contrast = contrast;
              params.noise_sigma = noise_sigma;
              params.vignette = vignette;
              params.seed = seed;
              const elproc::SynthModule mod =
                  elproc::render_module(spec_from_obj(spec), params);
              return py::make_tuple(array_from_image(mod.image), mod.truth.vertical_lines,
                                    mod.truth.horizontal_lines);
          },
          py::arg("spec"), py::arg("canvas_w") = 1024, py::arg("canvas_h") = 768,
          py::arg("contrast") = 1.0, py::arg("noise_sigma") = 0.0, py::arg("vignette") = 0.0,
          py::arg("seed") = 1);

    m.attr("__version__") = "0.1.0";
}
