#pragma once

#include "expreg/linsolve.hpp"
#include "expreg/operator.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace expreg {

struct ExpmConfig {
    int krylov_dim = 40;
    double rel_tol = 1e-9;
    std::int64_t max_substeps = 10000;
};

struct ExpmStats {
    std::int64_t substeps = 0;
    std::int64_t matvecs = 0;
    std::int64_t rejected = 0;
    /// Accumulated a-posteriori error bound, absolute.
    double error_bound = 0.0;
};

/// Throws InvalidSpec unless m >= 2 and 0 < rel_tol < 1.
void validate(const ExpmConfig& cfg);

/// y ~= e^{-T A} g with ||y - y_exact|| <= rel_tol ||g|| (Euclidean).
///
/// Symmetric Lanczos with full reorthogonalization on A, adaptive substeps
/// T = sum tau_i. Each substep is accepted when the bound
///
///   beta h_{m+1,m} int_0^tau |e_m^T exp(-s T_m) e_1| ds
///
/// (valid because ||e^{-tA}|| <= 1) stays within rel_tol ||g|| tau / T.
/// Rejected steps halve tau on the same Krylov basis; the next step starts
/// from twice the accepted tau.
std::vector<double> expm_apply(const DiscreteOperator& op, std::span<const double> g, double T,
                               const ExpmConfig& cfg = {}, ExpmStats* stats = nullptr);

/// Crank-Nicolson run of dw/dt = -A w, w(0) = g, with zero Dirichlet walls.
struct ParabolicTrace {
    std::vector<double> w_final;
    /// Trapezoid accumulation of the states, i.e. tau * sum of step midpoints.
    std::vector<double> u_T;
    /// ||w(t_k)||_h for k = 0..steps.
    std::vector<double> energy_history;
    std::vector<double> times;
    /// tau * sum_k <A wbar_k, wbar_k>_h over step midpoints wbar_k = (w_k + w_{k+1}) / 2.
    double dissipation = 0.0;
    std::int64_t steps = 0;
    std::int64_t inner_iterations = 0;
};

ParabolicTrace parabolic_integrate(const DiscreteOperator& op, std::span<const double> g, double T,
                                   std::int64_t steps, const SolverConfig& inner = {1e-12, 0, Preconditioner::Jacobi});

/// True when every entry is <= its predecessor times (1 + rel_slack).
bool is_nonincreasing(std::span<const double> history, double rel_slack = 0.0);

} // namespace expreg
