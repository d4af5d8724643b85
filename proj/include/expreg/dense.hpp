#pragma once

// Dense small-scale oracles. These factor the assembled matrix explicitly and
// are capped at n_int <= 2000.

#include "expreg/operator.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace expreg {

inline constexpr std::int64_t dense_size_cap = 2000;

/// Explicit matrix of the operator. Throws TooLarge above the cap.
Eigen::MatrixXd to_dense(const DiscreteOperator& op);

/// Cholesky solve. Throws TooLarge, SingularOperator.
std::vector<double> dense_solve(const DiscreteOperator& op, std::span<const double> b);

/// Full symmetric eigendecomposition A = V diag(lambda) V^T.
struct DenseSpectrum {
    Eigen::VectorXd eigenvalues; // ascending
    Eigen::MatrixXd eigenvectors;

    /// V f(Lambda) V^T g for a scalar function f.
    template <class F>
    std::vector<double> apply_function(F&& f, std::span<const double> g) const
    {
        const Eigen::Map<const Eigen::VectorXd> gv(g.data(), static_cast<Eigen::Index>(g.size()));
        Eigen::VectorXd c = eigenvectors.transpose() * gv;
        for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= f(eigenvalues[i]);
        const Eigen::VectorXd y = eigenvectors * c;
        return {y.data(), y.data() + y.size()};
    }
};

DenseSpectrum dense_spectrum(const DiscreteOperator& op);

/// e^{-T A} g from the eigendecomposition.
std::vector<double> expm_dense(const DiscreteOperator& op, std::span<const double> g, double T);

/// A^{-1} (I - e^{-T A}) g, the exact time integral of the semi-discrete heat flow.
std::vector<double> time_integral_dense(const DiscreteOperator& op, std::span<const double> g, double T);

} // namespace expreg
