#pragma once

#include "expreg/expm.hpp"
#include "expreg/field.hpp"
#include "expreg/grid.hpp"
#include "expreg/linsolve.hpp"

#include <optional>
#include <variant>

namespace expreg {

namespace method {
/// Homogeneous Dirichlet truncation: A u = g.
struct Naive {};
/// Exponential regularization: A u = g - e^{-T A} g, zero Dirichlet.
struct Regularized {
    double T = 0.0;
};
/// Exact boundary values from a closed-form solution; source built by stencil_source.
struct ExactDirichlet {
    SolutionSpec solution;
};
} // namespace method

using Method = std::variant<method::Naive, method::Regularized, method::ExactDirichlet>;

struct SolveRequest {
    GridSpec grid;
    CoefficientSpec coefficient;
    SourceSpec source;
    Method method = method::Naive{};
    SolverConfig solver;
    ExpmConfig expm;
};

struct SolveResult {
    GridFunction u;
    SolveStats stats;
    std::optional<double> T;
    ExpmStats expm_stats;
    double seconds = 0.0;
};

SolveResult naive_solve(const SolveRequest& req);
SolveResult regularized_solve(const SolveRequest& req);
SolveResult exact_dirichlet_solve(const SolveRequest& req);

/// Dispatches on req.method.
SolveResult solve(const SolveRequest& req);

/// Operator-level regularized solve: u solves A u = g - e^{-T A} g.
struct RegularizedInterior {
    std::vector<double> u;
    SolveStats stats;
    ExpmStats expm_stats;
};
RegularizedInterior regularized_interior(const DiscreteOperator& op, std::span<const double> g, double T,
                                         const SolverConfig& solver = {}, const ExpmConfig& expm = {});

/// T = |R - L| / (2 pi sqrt(alpha beta)). Throws InvalidGeometry unless R > L > 0
/// and InvalidSpec unless 0 < alpha <= beta.
double choose_T(double R, double L, double alpha, double beta);

} // namespace expreg
