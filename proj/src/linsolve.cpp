#include "expreg/linsolve.hpp"

#include <cmath>

namespace expreg {

void validate(const SolverConfig& cfg)
{
    if (!(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0)) throw Error(ErrorCode::InvalidSpec, "solver rel_tol must lie in (0, 1)");
    if (cfg.max_iter < 0) throw Error(ErrorCode::InvalidSpec, "solver max_iter must be >= 1 (0 selects the default)");
}

std::int64_t default_iteration_cap(const DiscreteOperator& op)
{
    const Grid& g = op.grid();
    const double per_axis = std::pow(static_cast<double>(g.num_interior()), 1.0 / g.dim());
    const double cap = 10.0 * per_axis * g.nodes_per_unit() * g.side();
    return std::max<std::int64_t>(100, static_cast<std::int64_t>(std::ceil(cap)));
}

LinearSolution cg_solve(const DiscreteOperator& op, std::span<const double> b, const SolverConfig& cfg,
                        std::span<const double> x0)
{
    validate(cfg);
    if (static_cast<std::int64_t>(b.size()) != op.size()) throw Error(ErrorCode::DimMismatch, "right-hand side has the wrong length");
    const std::int64_t cap = cfg.max_iter > 0 ? cfg.max_iter : default_iteration_cap(op);
    return detail::pcg([&op](std::span<const double> in, std::span<double> out) { op.apply(in, out); },
                       op.diagonal(), b, cfg, cap, x0);
}

} // namespace expreg
