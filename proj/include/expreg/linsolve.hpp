#pragma once

#include "expreg/error.hpp"
#include "expreg/operator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace expreg {

enum class Preconditioner { None, Jacobi };

struct SolverConfig {
    double rel_tol = 1e-10;
    /// 0 selects the default cap 10 * n_int^{1/d} * rho * R.
    std::int64_t max_iter = 0;
    Preconditioner preconditioner = Preconditioner::Jacobi;
};

struct SolveStats {
    std::int64_t iterations = 0;
    double final_relative_residual = 0.0;
    double elapsed = 0.0;
};

struct LinearSolution {
    std::vector<double> x;
    SolveStats stats;
};

/// Throws InvalidSpec unless 0 < rel_tol < 1 and max_iter >= 0.
void validate(const SolverConfig& cfg);

/// Default iteration cap for an operator.
std::int64_t default_iteration_cap(const DiscreteOperator& op);

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Preconditioned CG for an SPD operator given by `apply(in, out)`.
///
/// Converges on the unpreconditioned residual ||b - A x|| <= rel_tol ||b||.
/// The recursive residual is re-checked against an explicit product before
/// returning; a drifted residual restarts the iteration from the true one.
template <class ApplyFn>
LinearSolution pcg(ApplyFn&& apply, std::span<const double> diag, std::span<const double> b,
                   const SolverConfig& cfg, std::int64_t cap, std::span<const double> x0 = {})
{
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = b.size();
    LinearSolution sol;
    sol.x.assign(n, 0.0);
    if (!x0.empty()) {
        if (x0.size() != n) throw Error(ErrorCode::DimMismatch, "initial guess has the wrong length");
        sol.x.assign(x0.begin(), x0.end());
    }

    const double bnorm = std::sqrt(dot(b, b));
    auto finish = [&](double rel) {
        sol.stats.final_relative_residual = rel;
        sol.stats.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return sol;
    };
    if (bnorm == 0.0) {
        std::fill(sol.x.begin(), sol.x.end(), 0.0);
        return finish(0.0);
    }
    const double target = cfg.rel_tol * bnorm;
    const bool jacobi = cfg.preconditioner == Preconditioner::Jacobi;

    std::vector<double> r(n), z(n), p(n), q(n);
    auto true_residual = [&]() {
        apply(std::span<const double>(sol.x), std::span<double>(q));
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
        return std::sqrt(dot(r, r));
    };

    double rnorm = true_residual();
    std::int64_t it = 0;
    while (true) {
        if (rnorm <= target) return finish(rnorm / bnorm);
        if (!std::isfinite(rnorm)) throw Error(ErrorCode::NonFiniteBreakdown, "non-finite residual in CG");

        double rz_old = 0.0;
        bool restart = false;
        for (bool first = true; it < cap; ++it) {
            for (std::size_t i = 0; i < n; ++i) z[i] = jacobi ? r[i] / diag[i] : r[i];
            const double rz = dot(r, z);
            if (first) {
                p = z;
                first = false;
            } else {
                const double beta = rz / rz_old;
                for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
            }
            rz_old = rz;
            apply(std::span<const double>(p), std::span<double>(q));
            const double pq = dot(p, q);
            if (!(pq > 0.0)) {
                if (!std::isfinite(pq)) throw Error(ErrorCode::NonFiniteBreakdown, "non-finite curvature in CG");
                throw Error(ErrorCode::SingularOperator, "operator is not positive definite");
            }
            const double alpha = rz / pq;
            for (std::size_t i = 0; i < n; ++i) {
                sol.x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            rnorm = std::sqrt(dot(r, r));
            if (rnorm <= target) {
                ++it;
                restart = true;
                break;
            }
        }
        sol.stats.iterations = it;
        const double checked = true_residual();
        if (checked <= target) return finish(checked / bnorm);
        if (!restart || it >= cap) throw NonConvergenceError(checked / bnorm, it);
        rnorm = checked;
    }
}

} // namespace detail

/// Jacobi-preconditioned CG on the discrete operator.
LinearSolution cg_solve(const DiscreteOperator& op, std::span<const double> b, const SolverConfig& cfg = {},
                        std::span<const double> x0 = {});

} // namespace expreg
