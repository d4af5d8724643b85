#pragma once

#include "expreg/field.hpp"
#include "expreg/grid.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace expreg {

/// Matrix-free conservative flux stencil for -div(a grad .) on the interior
/// nodes of a grid, homogeneous Dirichlet values eliminated:
///
///   (A u)_j = h^-2 sum_i [ a_{j+e_i/2} (u_j - u_{j+e_i}) + a_{j-e_i/2} (u_j - u_{j-e_i}) ]
///
/// with a sampled at edge midpoints. A is symmetric positive definite and an
/// M-matrix. Vectors are interior vectors in the grid's interior numbering.
class DiscreteOperator {
public:
    DiscreteOperator(Grid grid, const CoefficientSpec& coeff);

    const Grid& grid() const noexcept { return grid_; }
    /// Interior dimension n_int.
    std::int64_t size() const noexcept { return grid_.num_interior(); }

    void apply(std::span<const double> u, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> u) const;

    std::span<const double> diagonal() const noexcept { return diag_; }
    /// Max Gershgorin row bound, an upper bound on the spectrum.
    double gershgorin_bound() const noexcept { return gershgorin_; }

    /// Coefficient on the edge from interior node k towards +e_axis (upper = true) or -e_axis.
    double edge(int axis, std::int64_t k, bool upper) const noexcept;

    /// Discrete inner product h^d <u, v>.
    double inner(std::span<const double> u, std::span<const double> v) const noexcept;
    /// sqrt(inner(u, u)).
    double norm(std::span<const double> u) const noexcept;

    /// Copy with the sign of every off-diagonal entry flipped. Breaks the
    /// M-matrix structure; exists to check that verification catches it.
    DiscreteOperator with_flipped_offdiagonal() const;

private:
    void finish();

    Grid grid_;
    int dim_;
    std::int64_t m_;                     // interior nodes per axis
    std::array<std::int64_t, 3> shape_;  // padded interior shape
    std::array<std::int64_t, 3> stride_; // padded interior strides
    // edges_[axis][0][k]: coefficient towards -e_axis, edges_[axis][1][k]: towards +e_axis
    std::vector<std::array<std::vector<double>, 2>> edges_;
    std::vector<double> diag_;
    double gershgorin_ = 0.0;
    double offdiag_sign_ = -1.0;
};

/// Builds the operator on the grid's interior.
DiscreteOperator assemble(const Grid& grid, const CoefficientSpec& coeff);

namespace bc {
struct HomogeneousDirichlet {};
/// Boundary values taken from a grid function on the operator's grid.
struct DirichletData {
    GridFunction values;
};
} // namespace bc

using BoundaryCondition = std::variant<bc::HomogeneousDirichlet, bc::DirichletData>;

/// Interior right-hand side: interior restriction of rhs plus the eliminated
/// boundary couplings a_edge * u_b / h^2 for Dirichlet data.
std::vector<double> apply_bc(const DiscreteOperator& op, const BoundaryCondition& bc, const GridFunction& rhs);

} // namespace expreg
