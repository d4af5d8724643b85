#include "expreg/regsolve.hpp"

#include "expreg/error.hpp"
#include "expreg/operator.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

namespace expreg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

SolveResult naive_solve(const SolveRequest& req)
{
    const auto start = Clock::now();
    const Grid grid = build_grid(req.grid);
    const DiscreteOperator op = assemble(grid, req.coefficient);
    const GridFunction g = source_values(req.source, req.coefficient, grid);
    const std::vector<double> b = apply_bc(op, bc::HomogeneousDirichlet{}, g);
    LinearSolution sol = cg_solve(op, b, req.solver);
    SolveResult out{from_interior(grid, sol.x), sol.stats, std::nullopt, {}, 0.0};
    out.seconds = seconds_since(start);
    return out;
}

RegularizedInterior regularized_interior(const DiscreteOperator& op, std::span<const double> g, double T,
                                         const SolverConfig& solver, const ExpmConfig& expm)
{
    if (!(T > 0.0)) throw Error(ErrorCode::InvalidSpec, "regularized solve requires T > 0");
    RegularizedInterior out;
    std::vector<double> r = expm_apply(op, g, T, expm, &out.expm_stats);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = g[i] - r[i];
    LinearSolution sol = cg_solve(op, r, solver);
    out.u = std::move(sol.x);
    out.stats = sol.stats;
    return out;
}

SolveResult regularized_solve(const SolveRequest& req)
{
    const auto* m = std::get_if<method::Regularized>(&req.method);
    if (m == nullptr) throw Error(ErrorCode::InvalidSpec, "regularized_solve called with a different method");
    const auto start = Clock::now();
    const Grid grid = build_grid(req.grid);
    const DiscreteOperator op = assemble(grid, req.coefficient);
    const GridFunction g = source_values(req.source, req.coefficient, grid);
    const std::vector<double> b = apply_bc(op, bc::HomogeneousDirichlet{}, g);
    RegularizedInterior reg = regularized_interior(op, b, m->T, req.solver, req.expm);
    SolveResult out{from_interior(grid, reg.u), reg.stats, m->T, reg.expm_stats, 0.0};
    out.seconds = seconds_since(start);
    return out;
}

SolveResult exact_dirichlet_solve(const SolveRequest& req)
{
    const auto* m = std::get_if<method::ExactDirichlet>(&req.method);
    if (m == nullptr) throw Error(ErrorCode::InvalidSpec, "exact_dirichlet_solve called with a different method");
    const auto start = Clock::now();
    const Grid grid = build_grid(req.grid);
    const DiscreteOperator op = assemble(grid, req.coefficient);
    const GridFunction g = stencil_source(m->solution, req.coefficient, grid);
    GridFunction boundary = sample(m->solution, grid);
    const std::vector<double> b = apply_bc(op, bc::DirichletData{boundary}, g);
    LinearSolution sol = cg_solve(op, b, req.solver);
    for (std::int64_t k = 0; k < grid.num_interior(); ++k) {
        boundary.values[static_cast<std::size_t>(grid.interior_to_flat(k))] = sol.x[static_cast<std::size_t>(k)];
    }
    SolveResult out{std::move(boundary), sol.stats, std::nullopt, {}, 0.0};
    out.seconds = seconds_since(start);
    return out;
}

SolveResult solve(const SolveRequest& req)
{
    if (std::holds_alternative<method::Naive>(req.method)) return naive_solve(req);
    if (std::holds_alternative<method::Regularized>(req.method)) return regularized_solve(req);
    return exact_dirichlet_solve(req);
}

double choose_T(double R, double L, double alpha, double beta)
{
    if (!(L > 0.0) || !(R > L)) {
        std::ostringstream os;
        os << "need R > L > 0 (got R=" << R << ", L=" << L << ")";
        throw Error(ErrorCode::InvalidGeometry, os.str());
    }
    if (!(alpha > 0.0) || beta < alpha) throw Error(ErrorCode::InvalidSpec, "need 0 < alpha <= beta");
    return std::abs(R - L) / (2.0 * std::numbers::pi * std::sqrt(alpha * beta));
}

} // namespace expreg
