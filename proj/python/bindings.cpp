#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "windlab/acceptance.hpp"
#include "windlab/continuum.hpp"
#include "windlab/harmonic.hpp"
#include "windlab/lattice.hpp"
#include "windlab/loopsoup.hpp"
#include "windlab/sde.hpp"
#include "windlab/wilson.hpp"

namespace py = pybind11;
using namespace windlab;

PYBIND11_MODULE(_windlab, m)
{
    m.attr("__version__") = WINDLAB_VERSION;

    py::class_<AnnularLattice>(m, "AnnularLattice")
        .def_static("disc", &AnnularLattice::disc, py::arg("outer_radius"), py::arg("inner_radius"))
        .def_static("square", &AnnularLattice::square, py::arg("half_outer"), py::arg("half_hole"))
        .def_property_readonly("size", &AnnularLattice::size)
        .def_property_readonly("free_count", &AnnularLattice::free_count)
        .def_property_readonly("outer_boundary", &AnnularLattice::outer_boundary)
        .def_property_readonly("inner_boundary", &AnnularLattice::inner_boundary)
        .def("point", [](const AnnularLattice& l, int v) { return std::pair{l.point(v).x, l.point(v).y}; })
        .def("at", &AnnularLattice::at)
        .def("neighbors", &AnnularLattice::neighbors)
        .def("is_outer", &AnnularLattice::is_outer)
        .def("is_inner", &AnnularLattice::is_inner);

    py::class_<Zipper>(m, "Zipper")
        .def_static("default_ray", &Zipper::default_ray, py::keep_alive<0, 1>())
        .def_static("none", &Zipper::none, py::keep_alive<0, 1>())
        .def("crossing_sign", &Zipper::crossing_sign)
        .def_property_readonly("crossed_edges", &Zipper::crossed_edges);

    m.def("lattice_to_json", [](const AnnularLattice& l, const Zipper* z) { return lattice_to_json(l, z); },
          py::arg("lattice"), py::arg("zipper") = nullptr);
    m.def("crossing_number", &crossing_number);

    py::class_<WindingExact>(m, "WindingExact")
        .def_readonly("cf", &WindingExact::cf)
        .def_readonly("event_probability", &WindingExact::event_probability);
    m.def("winding_cf_exact", &winding_cf_exact);
    m.def("fomin_determinant", &fomin_determinant);
    m.def("loop_mass_ratio", &loop_mass_ratio);
    m.def("green_nd", &green_nd);

    py::class_<BruteForceWinding>(m, "BruteForceWinding")
        .def_readonly("cf", &BruteForceWinding::cf)
        .def_readonly("event_probability", &BruteForceWinding::event_probability)
        .def_readonly("parity_holds", &BruteForceWinding::parity_holds)
        .def_readonly("tree_count", &BruteForceWinding::tree_count);
    m.def("brute_force_winding_cf", &brute_force_winding_cf);
    m.def("matrix_tree_count", &matrix_tree_count);

    py::class_<WindingMc>(m, "WindingMc")
        .def_readonly("estimate", &WindingMc::estimate)
        .def_readonly("se_re", &WindingMc::se_re)
        .def_readonly("se_im", &WindingMc::se_im)
        .def_readonly("accepted", &WindingMc::accepted)
        .def_readonly("attempts", &WindingMc::attempts);
    m.def(
        "winding_cf_mc",
        [](const AnnularLattice& l, const Zipper& z, double beta, const std::vector<int>& xs,
           std::optional<std::vector<int>> vs, std::uint64_t samples, std::uint64_t seed) {
            return winding_cf_mc(l, z, beta, xs, vs, samples, seed);
        },
        py::arg("lattice"), py::arg("zipper"), py::arg("beta"), py::arg("xs"), py::arg("vs"), py::arg("samples"),
        py::arg("seed"));

    py::class_<CampbellEstimate>(m, "CampbellEstimate")
        .def_readonly("estimate", &CampbellEstimate::estimate)
        .def_readonly("se_re", &CampbellEstimate::se_re)
        .def_readonly("se_im", &CampbellEstimate::se_im);
    m.def(
        "campbell_cf",
        [](const AnnularLattice& l, const Zipper& z, double beta, std::uint64_t soups, std::uint64_t seed) {
            LoopSoupSampler sampler(l, z, loop_length_for_tolerance(l, 1e-6));
            return campbell_cf_mc(sample_soup_summaries(sampler, soups, seed, 0), beta);
        },
        py::arg("lattice"), py::arg("zipper"), py::arg("beta"), py::arg("soups"), py::arg("seed"));

    py::class_<MarkedAnnulus>(m, "MarkedAnnulus")
        .def(py::init([](double r, std::vector<double> inner, std::vector<double> outer) {
                 return MarkedAnnulus{r, std::move(inner), std::move(outer)};
             }),
             py::arg("r"), py::arg("inner_args"), py::arg("outer_args"))
        .def_readwrite("r", &MarkedAnnulus::r)
        .def_readwrite("inner_args", &MarkedAnnulus::inner_args)
        .def_readwrite("outer_args", &MarkedAnnulus::outer_args)
        .def("c", &MarkedAnnulus::c);
    m.def("annulus_det_series", [](const MarkedAnnulus& a, double b) { return annulus_det_series(a, b).value; },
          py::arg("marked"), py::arg("b"));
    m.def("huniv_beta", [](double r, double beta, double ax, double rho, double aw, int M) {
        return huniv_beta(r, beta, ax, rho, aw, M).value;
    });
    m.def("strip_poisson_kernel", &strip_poisson_kernel);
    m.def("odd_loop_log_ratio", &odd_loop_log_ratio);
    m.def("coe_normalization", [](int n) { return coe_normalization(n).value; });
    m.def("coe_density", &coe_density);
    m.def("coe_sample", [](int n, std::uint64_t seed, int count) {
        Rng rng = make_stream(seed, 0);
        std::vector<std::vector<double>> out;
        for (int i = 0; i < count; ++i)
            out.push_back(coe_sample(n, rng));
        return out;
    });
    m.def("disc_green", &disc_green);
    m.def("frak_h", &frak_h);

    m.def(
        "simulate_dbm",
        [](int n, double kappa, double t_end, double dt, std::uint64_t seed) {
            Rng rng = make_stream(seed, 0);
            const auto p = dbm_with_coe_start(n, kappa, t_end, dt, rng);
            return std::pair{p.times, p.thetas};
        },
        py::arg("n"), py::arg("kappa"), py::arg("t_end"), py::arg("dt"), py::arg("seed"));
    m.def(
        "winding_covariance",
        [](int n, double kappa, double t_end, std::uint64_t paths, std::uint64_t seed) {
            return sle_winding_experiment(n, kappa, t_end, paths, seed).covariance;
        },
        py::arg("n"), py::arg("kappa"), py::arg("t_end"), py::arg("paths"), py::arg("seed"));

    py::class_<CriterionResult>(m, "CriterionResult")
        .def_readonly("id", &CriterionResult::id)
        .def_readonly("name", &CriterionResult::name)
        .def_readonly("passed", &CriterionResult::pass)
        .def_readonly("detail", &CriterionResult::detail)
        .def_readonly("seconds", &CriterionResult::seconds)
        .def("__str__", &format_result_line);
    m.def("acceptance_suite", &acceptance_suite);
    m.def("run_criterion", &run_criterion, py::call_guard<py::gil_scoped_release>());
}
