#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "liepnm/charts.hpp"
#include "liepnm/error.hpp"
#include "liepnm/expr.hpp"
#include "liepnm/lie.hpp"
#include "liepnm/pipeline.hpp"
#include "liepnm/tmg.hpp"

namespace py = pybind11;
using namespace liepnm;

namespace {

std::vector<lie::PolyVectorField> second_order_generators() {
    return charts::OdeFamily::second_order(5.0, 10.0, -10.0, 1.0).generators();
}

py::dict ensemble_dict(const pipeline::PosteriorEnsemble& e) {
    py::dict d;
    d["rho"] = e.rho;
    d["design"] = e.design;
    d["G"] = e.G;
    d["data"] = e.data;
    d["z"] = e.z;
    d["r_grid"] = e.r_grid;
    d["s"] = e.s;
    d["x"] = e.x;
    d["y"] = e.y;
    d["x_grid"] = e.x_grid;
    d["y_on_x"] = e.y_on_x;
    d["mean_y"] = e.mean_y();
    d["q05"] = e.quantile_y(0.05);
    d["q95"] = e.quantile_y(0.95);
    return d;
}

}  // namespace

PYBIND11_MODULE(_liepnm, m) {
    m.doc() = "Exact Bayesian solver for ODEs with solvable Lie symmetry";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());
    py::register_exception<StageError>(m, "StageError", base.ptr());

    py::class_<expr::Expression>(m, "Expression")
        .def("__call__", &expr::Expression::operator(), py::arg("r"))
        .def("derivative", [](const expr::Expression& e, double r) { return e.differentiate(r).slope; })
        .def("__str__", &expr::Expression::to_string);
    m.def("parse", &expr::parse, py::arg("text"), "Parse an expression in the variable r");

    m.def(
        "commutators",
        [] {
            const auto g = second_order_generators();
            py::dict out;
            for (std::size_t i = 0; i < g.size(); ++i)
                for (std::size_t j = i + 1; j < g.size(); ++j) {
                    const auto c = lie::span_coefficients(lie::commutator(g[i], g[j]), g);
                    out[py::str("[X" + std::to_string(i + 1) + ",X" + std::to_string(j + 1) + "]")] =
                        c ? lie::format_combination(*c) : lie::commutator(g[i], g[j]).to_string();
                }
            return out;
        },
        "Commutator table of the second-order example generators");

    m.def(
        "sample_tmg",
        [](const Eigen::MatrixXd& F, const Eigen::VectorXd& g, std::size_t count, std::uint64_t seed,
           std::size_t burn_in, double travel_time) {
            const tmg::TruncatedGaussianProblem problem(F, g);
            tmg::Chain chain;
            {
                py::gil_scoped_release release;
                chain = tmg::sample(problem, count, seed, {burn_in, travel_time, 0});
            }
            Eigen::MatrixXd out(static_cast<Eigen::Index>(chain.samples.size()), F.cols());
            for (std::size_t i = 0; i < chain.samples.size(); ++i)
                out.row(static_cast<Eigen::Index>(i)) = chain.samples[i].transpose();
            return out;
        },
        py::arg("F"), py::arg("g"), py::arg("count"), py::arg("seed") = 0, py::arg("burn_in") = 1000,
        py::arg("travel_time") = 1.5707963267948966,
        "Samples of N(0, I) restricted to F z + g >= 0, one per row");

    m.def(
        "solve_first_order",
        [](const std::string& F, double y0, double x_T, std::size_t n, std::size_t N, double r_max,
           std::size_t samples, std::size_t burn_in, std::uint64_t seed, double x0) {
            pipeline::SolveConfig c;
            c.family = charts::OdeFamily::first_order(expr::parse(F), y0, x_T, x0);
            c.n = n;
            c.N = N;
            c.r_max = r_max;
            c.samples = samples;
            c.burn_in = burn_in;
            c.seed = seed;
            pipeline::PosteriorEnsemble e = [&] {
                py::gil_scoped_release release;
                return pipeline::solve(c);
            }();
            return ensemble_dict(e);
        },
        py::arg("F"), py::arg("y0"), py::arg("x_T"), py::arg("n"), py::arg("N") = 0, py::arg("r_max"),
        py::arg("samples") = 200, py::arg("burn_in") = 1000, py::arg("seed") = 0, py::arg("x0") = 1.0);

    m.def(
        "solve_second_order",
        [](double x0, double x_T, double y0, double y0_prime, std::size_t n, std::size_t N, double r_max,
           std::size_t samples, std::size_t burn_in, std::uint64_t seed) {
            pipeline::SolveConfig c;
            c.family = charts::OdeFamily::second_order(x0, x_T, y0, y0_prime);
            c.n = n;
            c.N = N;
            c.r_max = r_max;
            c.samples = samples;
            c.burn_in = burn_in;
            c.seed = seed;
            pipeline::PosteriorEnsemble e = [&] {
                py::gil_scoped_release release;
                return pipeline::solve(c);
            }();
            return ensemble_dict(e);
        },
        py::arg("x0"), py::arg("x_T"), py::arg("y0"), py::arg("y0_prime"), py::arg("n"), py::arg("N") = 0,
        py::arg("r_max"), py::arg("samples") = 200, py::arg("burn_in") = 1000, py::arg("seed") = 0);

    m.def("reference_first_order", &pipeline::reference_first_order, py::arg("x"));
    m.def(
        "reference_second_order",
        [](double x0, double y0, double y0_prime, const std::vector<double>& grid, double tolerance) {
            return pipeline::reference_second_order(x0, y0, y0_prime, grid, tolerance);
        },
        py::arg("x0"), py::arg("y0"), py::arg("y0_prime"), py::arg("grid"), py::arg("tolerance") = 1e-12);
}
