#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "expreg/config.hpp"
#include "expreg/experiments.hpp"
#include "expreg/expm.hpp"
#include "expreg/greens.hpp"
#include "expreg/io.hpp"
#include "expreg/regsolve.hpp"
#include "expreg/spectral.hpp"
#include "expreg/verify.hpp"

#include <cmath>
#include <optional>

namespace py = pybind11;
using namespace expreg;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Lattice matching a full-grid array of shape (n,)*d on a cube of the given side.
Grid grid_for(const Array& a, double side)
{
    const auto d = static_cast<int>(a.ndim());
    if (d < 1 || d > 3) throw py::value_error("arrays must have 1 to 3 dimensions");
    const auto n = static_cast<std::int64_t>(a.shape(0));
    for (int k = 1; k < d; ++k) {
        if (a.shape(k) != n) throw py::value_error("arrays must be cubic");
    }
    if (n < 3) throw py::value_error("need at least 3 nodes per axis");
    const double h = side / static_cast<double>(n - 1);
    return Grid::lattice(d, n, h, static_cast<int>(std::lround(1.0 / h)));
}

GridFunction to_field(const Array& a, double side)
{
    Grid g = grid_for(a, side);
    std::vector<double> v(a.data(), a.data() + a.size());
    return GridFunction(std::move(g), std::move(v));
}

Array to_array(const GridFunction& u)
{
    std::vector<py::ssize_t> shape(static_cast<std::size_t>(u.grid.dim()), static_cast<py::ssize_t>(u.grid.n()));
    Array out(shape);
    std::copy(u.values.begin(), u.values.end(), out.mutable_data());
    return out;
}

CoefficientSpec coefficient_from(const std::string& json)
{
    return parse_coefficient(Json::parse(json));
}

Json report_json(const ErrorReport& rep)
{
    Json j = fits_to_json(rep);
    Json rows = Json::array();
    for (const auto& r : rep.rows) {
        rows.push_back({{"R", r.R},
                        {"L", r.L},
                        {"T", r.T ? Json(*r.T) : Json()},
                        {"method", r.method},
                        {"error", r.error},
                        {"iterations", r.iterations},
                        {"residual", r.residual},
                        {"seconds", r.seconds}});
    }
    j["rows"] = rows;
    return j;
}

} // namespace

PYBIND11_MODULE(_expreg, m)
{
    m.doc() = "Exponentially regularized elliptic solves on truncated domains";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(PyExc_RuntimeError, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
        }
    });

    m.def("choose_T", &choose_T, py::arg("R"), py::arg("L"), py::arg("alpha"), py::arg("beta"),
          "T = |R - L| / (2 pi sqrt(alpha beta))");

    m.def(
        "solve_json",
        [](const std::string& config) {
            const SolveConfig cfg = parse_solve(Json::parse(config));
            std::optional<SolveResult> out;
            {
                py::gil_scoped_release nogil;
                out = solve(cfg.request);
            }
            const SolveResult& res = *out;
            Json info{{"iterations", res.stats.iterations},
                      {"residual", res.stats.final_relative_residual},
                      {"seconds", res.seconds},
                      {"R", res.u.grid.side()},
                      {"h", res.u.grid.h()}};
            if (res.T) info["T"] = *res.T;
            return py::make_tuple(to_array(res.u), info.dump());
        },
        py::arg("config"), "Solve a {\"solve\": {...}} config given as a JSON string. Returns (u, info_json).");

    m.def(
        "run_experiment_json",
        [](const std::string& config, int threads) {
            ExperimentPlan plan = parse_plan(Json::parse(config));
            plan.threads = threads;
            ErrorReport rep;
            {
                py::gil_scoped_release nogil;
                rep = run_experiment(plan);
            }
            return report_json(rep).dump();
        },
        py::arg("config"), py::arg("threads") = 1, "Run a {\"plan\": {...}} config; returns the report as JSON.");

    m.def(
        "band_filter",
        [](const Array& g, double side, double omega0) { return to_array(band_filter(to_field(g, side), omega0)); },
        py::arg("g"), py::arg("side"), py::arg("omega0"), "Remove every periodic Fourier mode with |omega| <= omega0.");

    m.def(
        "remove_moments",
        [](const Array& g, double side, int k) { return to_array(remove_moments(to_field(g, side), k)); },
        py::arg("g"), py::arg("side"), py::arg("k"), "Subtract Gaussian templates so all moments of order <= k vanish.");

    m.def(
        "moments",
        [](const Array& g, double side, int k) {
            std::vector<std::pair<std::vector<int>, double>> out;
            const GridFunction f = to_field(g, side);
            for (const auto& mo : moments(f, k)) {
                out.emplace_back(std::vector<int>(mo.gamma.begin(), mo.gamma.begin() + f.grid.dim()), mo.value);
            }
            return out;
        },
        py::arg("g"), py::arg("side"), py::arg("k"), "Discrete moments as (gamma, value) pairs.");

    m.def(
        "expm_apply",
        [](const Array& g, double side, double T, const std::string& coefficient, double rel_tol) {
            const GridFunction f = to_field(g, side);
            const DiscreteOperator op = assemble(f.grid, coefficient_from(coefficient));
            const auto w = expm_apply(op, interior_values(f), T, {40, rel_tol, 10000});
            return to_array(from_interior(f.grid, w));
        },
        py::arg("g"), py::arg("side"), py::arg("T"), py::arg("coefficient") = "\"constant\"", py::arg("rel_tol") = 1e-9,
        "e^{-TA} g on the interior (zero walls). `coefficient` is a JSON coefficient spec.");

    m.def(
        "elliptic_green",
        [](int dim, double side, int nodes_per_unit, std::vector<double> y, const std::string& coefficient) {
            const Grid grid = build_grid({dim, side, nodes_per_unit});
            const DiscreteOperator op = assemble(grid, coefficient_from(coefficient));
            return to_array(elliptic_green(op, interior_node_at(grid, y)).values);
        },
        py::arg("dim"), py::arg("side"), py::arg("nodes_per_unit"), py::arg("y"),
        py::arg("coefficient") = "\"constant\"", "Discrete Green's function G(.; y).");

    m.def(
        "fit_decay",
        [](std::vector<double> xs, std::vector<double> errs, const std::string& model) {
            FitModel fm;
            if (model == "powerlaw") fm = FitModel::PowerLaw;
            else if (model == "exponential") fm = FitModel::Exponential;
            else throw py::value_error("model must be 'powerlaw' or 'exponential'");
            const FitResult f = fit_decay(xs, errs, fm);
            return py::make_tuple(f.slope, f.intercept, f.r2);
        },
        py::arg("xs"), py::arg("errs"), py::arg("model"), "Returns (slope, intercept, r2).");

    m.def("verify", []() {
        VerifyReport rep;
        {
            py::gil_scoped_release nogil;
            rep = run_verify();
        }
        std::vector<std::pair<std::string, bool>> checks;
        for (const auto& c : rep.checks) checks.emplace_back(c.name, c.pass);
        return py::make_tuple(rep.all_pass(), checks);
    });
}
