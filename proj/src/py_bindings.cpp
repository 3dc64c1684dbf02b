#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "sandpile/analysis.hpp"
#include "sandpile/field_io.hpp"
#include "sandpile/json_io.hpp"
#include "sandpile/render.hpp"

namespace py = pybind11;
using namespace sandpile;

namespace {

IntField field_from_array(py::array_t<std::int64_t, py::array::c_style | py::array::forcecast> arr,
                          std::pair<std::int64_t, std::int64_t> origin) {
    if (arr.ndim() != 2) throw std::domain_error("field array must be 2-d (rows are y)");
    Window w(origin.first, origin.second, arr.shape(1), arr.shape(0));
    IntField f(w);
    auto r = arr.unchecked<2>();
    for (py::ssize_t y = 0; y < arr.shape(0); ++y)
        for (py::ssize_t x = 0; x < arr.shape(1); ++x)
            f.values()[static_cast<std::size_t>(y) * static_cast<std::size_t>(arr.shape(1)) +
                       static_cast<std::size_t>(x)] = r(y, x);
    return f;
}

py::array_t<std::int64_t> field_to_array(const IntField& f) {
    const Window& w = f.window();
    py::array_t<std::int64_t> arr({w.height, w.width});
    auto r = arr.mutable_unchecked<2>();
    for (py::ssize_t y = 0; y < w.height; ++y)
        for (py::ssize_t x = 0; x < w.width; ++x)
            r(y, x) = f.values()[static_cast<std::size_t>(y) * static_cast<std::size_t>(w.width) +
                                 static_cast<std::size_t>(x)];
    return arr;
}

py::array_t<double> real_to_array(const RealField& f) {
    const Window& w = f.window();
    py::array_t<double> arr({w.height, w.width});
    auto r = arr.mutable_unchecked<2>();
    for (py::ssize_t y = 0; y < w.height; ++y)
        for (py::ssize_t x = 0; x < w.width; ++x)
            r(y, x) = f.values()[static_cast<std::size_t>(y) * static_cast<std::size_t>(w.width) +
                                 static_cast<std::size_t>(x)];
    return arr;
}

ShapeSpec shape_by_name(const std::string& name) {
    if (name == "unit-square") return ShapeSpec::unit_square();
    if (name == "square2") return ShapeSpec::square2();
    throw std::domain_error("shape must be unit-square or square2 (use polygons via the cli)");
}

std::vector<LatticePoint> cells_from_list(const std::vector<std::pair<std::int64_t, std::int64_t>>& v) {
    std::vector<LatticePoint> out;
    out.reserve(v.size());
    for (const auto& [x, y] : v) out.push_back({x, y});
    return out;
}

std::string json_str(const Json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "integer least-action lattice solver with an exact piecewise-quadratic "
              "continuum companion";

    py::class_<Window>(m, "Window")
        .def(py::init<std::int64_t, std::int64_t, std::int64_t, std::int64_t>(), py::arg("x0"),
             py::arg("y0"), py::arg("width"), py::arg("height"))
        .def_readonly("x0", &Window::x0)
        .def_readonly("y0", &Window::y0)
        .def_readonly("width", &Window::width)
        .def_readonly("height", &Window::height);

    py::class_<IntField>(m, "IntField")
        .def(py::init(&field_from_array), py::arg("array"),
             py::arg("origin") = std::pair<std::int64_t, std::int64_t>{0, 0})
        .def_property_readonly("window", &IntField::window)
        .def("to_numpy", &field_to_array)
        .def("at", [](const IntField& f, std::int64_t x, std::int64_t y) { return f.at({x, y}); });

    py::class_<DomainMask>(m, "DomainMask")
        .def_property_readonly("window", [](const DomainMask& m_) { return m_.win; })
        .def_property_readonly("n", [](const DomainMask& m_) { return m_.n; })
        .def_property_readonly("member_count", [](const DomainMask& m_) { return m_.member_count; })
        .def("is_member",
             [](const DomainMask& m_, std::int64_t x, std::int64_t y) { return m_.is_member({x, y}); });

    py::class_<Solution>(m, "Solution")
        .def_property_readonly("u", [](const Solution& s) { return s.u; })
        .def_property_readonly("cutoff", [](const Solution& s) { return s.cutoff; })
        .def_property_readonly("mask", [](const Solution& s) { return s.mask; })
        .def_property_readonly("stats_json", [](const Solution& s) { return json_str(stats_to_json(s)); });

    m.def("build_mask",
          [](const std::string& shape, std::int64_t n) { return build_mask(shape_by_name(shape), n); },
          py::arg("shape"), py::arg("n"));
    m.def("mask_from_points",
          [](const std::vector<std::pair<std::int64_t, std::int64_t>>& pts) {
              return mask_from_points(cells_from_list(pts));
          });

    m.def("solve_least",
          [](const DomainMask& mask, std::int64_t cutoff, int threads) {
              py::gil_scoped_release rel;
              return solve_least(mask, cutoff, threads);
          },
          py::arg("mask"), py::arg("cutoff") = 2, py::arg("threads") = 1);
    m.def("brute_force_least", &brute_force_least, py::arg("mask"), py::arg("cutoff"), py::arg("lo"));
    m.def("brute_force_bound", &brute_force_bound, py::arg("mask"), py::arg("cutoff") = 2);
    m.def("burning_pass", [](const Solution& s) { return burning_certificate(s).pass; });
    m.def("stabilize",
          [](const IntField& s, const DomainMask& mask, std::int64_t cutoff) {
              auto [odo, fin] = stabilize({s, mask}, cutoff);
              return py::make_tuple(odo, fin);
          },
          py::arg("grains"), py::arg("mask"), py::arg("cutoff") = 2);

    m.def("laplacian", [](const IntField& f) { return laplacian_field(f, f.window()); });
    m.def("laplacian_at",
          [](const IntField& f, std::int64_t x, std::int64_t y) { return laplacian_at(f, {x, y}); });
    m.def("shift_cutoff", &shift_cutoff, py::arg("field"), py::arg("alpha"));

    py::class_<SuperSolution>(m, "SuperSolution")
        .def_property_readonly("depth", &SuperSolution::depth)
        .def("gradient",
             [](const SuperSolution& ss, const std::string& x, const std::string& y) {
                 RatPoint g = ss.gradient_at({rat_from_string(x), rat_from_string(y)});
                 return py::make_tuple(rat_to_string(g.x), rat_to_string(g.y));
             })
        .def("value",
             [](const SuperSolution& ss, const std::string& x, const std::string& y) {
                 return rat_to_string(ss.value_at({rat_from_string(x), rat_from_string(y)}));
             })
        .def("value_f",
             [](const SuperSolution& ss, const std::string& x, const std::string& y) {
                 return rat_to_double(ss.value_at({rat_from_string(x), rat_from_string(y)}));
             })
        .def("sample",
             [](const SuperSolution& ss, std::int64_t n, const Window& w, int threads) {
                 RealField f = [&] {
                     py::gil_scoped_release rel;
                     return ss.sample_field(n, w, threads);
                 }();
                 return real_to_array(f);
             },
             py::arg("n"), py::arg("window"), py::arg("threads") = 1);

    m.def("ifs_generate", &ifs_generate, py::arg("depth"));
    m.def("pieces_json",
          [](const SuperSolution& ss, bool with_values) {
              return json_str(pieces_to_json(pieces(ss, with_values)));
          },
          py::arg("ss"), py::arg("with_values") = true);
    m.def("patch_decay_json",
          [](const SuperSolution& ss) { return json_str(decay_to_json(patch_measure_decay(ss))); });

    m.def("detect_period_json",
          [](const IntField& img, const std::vector<std::pair<std::int64_t, std::int64_t>>& cells,
             std::int64_t bound) -> py::object {
              auto pat = detect_period(img, Region::from_cells(cells_from_list(cells)), bound);
              if (!pat) return py::none();
              return py::str(json_str(pattern_to_json(*pat)));
          },
          py::arg("image"), py::arg("cells"), py::arg("bound"));
    m.def("match_fraction_json",
          [](const IntField& img, const std::string& pattern_json,
             const std::vector<std::pair<std::int64_t, std::int64_t>>& cells, std::int64_t r,
             int threads) {
              PeriodicPattern pat = pattern_from_json(Json::parse(pattern_json));
              MatchReport rep =
                  match_fraction(img, pat, Region::from_cells(cells_from_list(cells)), r, threads);
              return json_str(match_report_to_json(rep));
          },
          py::arg("image"), py::arg("pattern_json"), py::arg("cells"), py::arg("r"),
          py::arg("threads") = 1);

    m.def("convergence_report_json",
          [](const std::string& shape, const std::vector<std::int64_t>& ns, int depth, int threads) {
              std::string out = [&] {
                  py::gil_scoped_release rel;
                  return json_str(
                      convergence_to_json(convergence_report(shape_by_name(shape), ns, depth, threads)));
              }();
              return out;
          },
          py::arg("shape"), py::arg("ns"), py::arg("depth"), py::arg("threads") = 1);

    m.def("render_ppm",
          [](const IntField& f) {
              auto bytes = render_field_ppm(f, Palette::sandpile());
              return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
          });

    m.def("read_igf1", &read_igf1);
    m.def("write_igf1",
          [](const std::string& path, const IntField& f) { write_file_atomic(path, encode_igf1(f)); });

    m.attr("__version__") = "0.1.0";
}
